"""Run configuration: defaults, TOML/JSON files, and flag overrides.

Precedence is defaults < config file < command-line flags. The config hash
covers every semantic field (the workspace path is excluded: moving a
workspace does not change what a run computes).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ImportError:  # pragma: no cover
    import tomli as tomllib

from ..errors import ConfigError
from ..flowdata import TARGETS


def default_models() -> dict:
    return {
        "nb": {"enabled": True},
        "knn": {"enabled": True, "k": 5},
        "rf": {
            "enabled": True,
            "n_trees": 100,
            "bootstrap": True,
            "features_per_split": None,
            "max_depth": None,
            "min_samples_split": 2,
        },
        "ada": {"enabled": True, "n_rounds": 50, "learning_rate": 1.0},
    }


@dataclass
class RunConfig:
    dataset: str
    workspace: str = "workspace"
    schema: str = None  # path to a schema JSON; None means the built-in layout
    features: tuple = None  # None means the schema's feature list
    target: str = "binary_label"
    test_fraction: float = 0.2
    seed: int = 7
    smote: bool = True
    smote_k: int = 5
    correlation_threshold: float = 0.9
    scale: bool = False
    eda: bool = True
    bins: int = 30
    models: dict = field(default_factory=default_models)

    def validate(self) -> None:
        if not (0.0 <= self.test_fraction < 1.0):
            raise ConfigError("test_fraction must be in [0, 1)")
        if not (0.0 < self.correlation_threshold <= 1.0):
            raise ConfigError("correlation_threshold must be in (0, 1]")
        if self.target not in TARGETS:
            raise ConfigError(f"target must be one of {TARGETS}")
        if self.bins < 1:
            raise ConfigError("bins must be >= 1")
        if self.smote_k < 1:
            raise ConfigError("smote_k must be >= 1")
        known = default_models()
        for name, section in self.models.items():
            if name not in known:
                raise ConfigError(f"unknown model {name!r} in models section")
            for key in section:
                if key not in known[name]:
                    raise ConfigError(f"unknown option {key!r} for model {name!r}")

    def enabled_models(self) -> list:
        return [name for name in ("nb", "knn", "rf", "ada") if self.models.get(name, {}).get("enabled")]


_TOP_KEYS = {
    "dataset",
    "workspace",
    "schema",
    "features",
    "target",
    "test_fraction",
    "seed",
    "smote",
    "smote_k",
    "correlation_threshold",
    "scale",
    "eda",
    "bins",
    "models",
}


def load_run_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    if path.suffix == ".toml":
        with open(path, "rb") as fh:
            try:
                doc = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: invalid TOML ({exc})") from None
    elif path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    else:
        raise ConfigError(f"{path}: config must be a .toml or .json file")
    return config_from_dict(doc, base_dir=path.parent)


def config_from_dict(doc: dict, base_dir=None) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a table/object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "dataset" not in doc:
        raise ConfigError("config must set 'dataset'")

    models = default_models()
    for name, section in (doc.get("models") or {}).items():
        if name not in models:
            raise ConfigError(f"unknown model {name!r} in models section")
        if not isinstance(section, dict):
            raise ConfigError(f"models.{name} must be a table/object")
        models[name].update(section)

    def _path(value):
        if value is None:
            return None
        p = Path(value)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        return str(p)

    cfg = RunConfig(
        dataset=_path(doc["dataset"]),
        workspace=_path(doc.get("workspace", "workspace")),
        schema=_path(doc.get("schema")),
        features=tuple(doc["features"]) if doc.get("features") else None,
        target=str(doc.get("target", "binary_label")),
        test_fraction=float(doc.get("test_fraction", 0.2)),
        seed=int(doc.get("seed", 7)),
        smote=bool(doc.get("smote", True)),
        smote_k=int(doc.get("smote_k", 5)),
        correlation_threshold=float(doc.get("correlation_threshold", 0.9)),
        scale=bool(doc.get("scale", False)),
        eda=bool(doc.get("eda", True)),
        bins=int(doc.get("bins", 30)),
        models=models,
    )
    cfg.validate()
    return cfg


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 over the canonical JSON of the semantic config fields."""
    doc = {
        "dataset": cfg.dataset,
        "schema": cfg.schema,
        "features": list(cfg.features) if cfg.features else None,
        "target": cfg.target,
        "test_fraction": cfg.test_fraction,
        "seed": cfg.seed,
        "smote": cfg.smote,
        "smote_k": cfg.smote_k,
        "correlation_threshold": cfg.correlation_threshold,
        "scale": cfg.scale,
        "eda": cfg.eda,
        "bins": cfg.bins,
        "models": cfg.models,
    }
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
