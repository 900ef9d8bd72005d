"""End-to-end pipeline: ingest, curate, explore, split, resample, train,
evaluate, compare, report.

Every artifact lands in a workspace stage and is recorded in that stage's
manifest together with the run key (a hash over the semantic config and the
raw dataset's content hash). A later run with --reuse skips any step whose
declared outputs are all present, hash-valid, and carry the same run key;
a failed step removes whatever it had written so a workspace never holds
artifacts of half-finished steps.

The whole run is deterministic for a fixed dataset and config: manifests
agree hash-for-hash across repeat runs, and the report HTML is emitted in
stable mode so its bytes depend on inputs alone.
"""

from __future__ import annotations

import csv
import hashlib
import json
import shutil
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError, PipelineStepError
from ..eda import (
    class_distribution,
    drop_correlated,
    histogram,
    pearson,
    write_class_distribution_csv,
    write_correlation_csv,
    write_histogram_csv,
)
from ..flowdata import (
    DEFAULT_SCHEMA,
    EncoderMap,
    FeatureMatrix,
    LabelVector,
    assemble,
    fit_encoder,
    load_flow_csv,
    load_schema,
)
from ..learners import (
    apply_scaler,
    fit_family,
    fit_scaler,
    load_model,
    load_scaler,
    predict,
    save_model,
    save_scaler,
)
from ..metrics import (
    compare,
    confusion,
    load_report,
    render_comparison_text,
    save_report,
    score,
    write_comparison_csv,
)
from ..sampling import load_split, save_split, smote, stratified_split
from .config import RunConfig, config_hash
from .report import emit_report
from .workspace import (
    Workspace,
    file_sha256,
    find_entry,
    init_workspace,
    record_file,
    remove_file,
    workspace_lock,
)

DISPLAY_NAMES = {"nb": "Naive Bayes", "knn": "KNN", "rf": "Random Forest", "ada": "AdaBoost"}

STEPS = (
    "ingest",
    "curate",
    "eda",
    "split",
    "resample",
    "scale",
    "train",
    "evaluate",
    "compare",
    "report",
)


@dataclass(frozen=True)
class RunSummary:
    config: str  # config hash
    run_key: str  # config hash + raw dataset hash
    seed: int
    steps: tuple  # (step name, "ran" | "reused" | "disabled")
    models: tuple
    comparison: object  # ComparisonTable
    report_path: str
    warnings: tuple


def run_key_for(cfg: RunConfig, dataset_sha: str) -> str:
    return hashlib.sha256(f"{config_hash(cfg)}:{dataset_sha}".encode("ascii")).hexdigest()


def _fmt_cell(value, kind: str) -> str:
    if kind == "real":
        return repr(float(value))
    return str(value)


def _save_encoders(encoders, kinds: dict, path) -> None:
    columns = []
    for e in encoders:
        ordered = sorted(e.mapping.items(), key=lambda kv: kv[1])
        columns.append(
            {
                "column": e.column,
                "kind": kinds[e.column],
                "policy": e.policy,
                "values": [v for v, _ in ordered],  # index == code
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"columns": columns}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_encoders(path) -> list:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    out = []
    for col in doc["columns"]:
        mapping = {v: i for i, v in enumerate(col["values"])}
        out.append(EncoderMap(column=col["column"], mapping=mapping, policy=col["policy"]))
    return out


class _Run:
    """One pipeline execution; holds the in-flight artifacts."""

    def __init__(self, ws: Workspace, cfg: RunConfig, reuse: bool):
        self.ws = ws
        self.cfg = cfg
        self.reuse = reuse
        self.statuses = []
        self.warnings = []
        self.enabled = cfg.enabled_models()

        dataset = Path(cfg.dataset)
        if not dataset.is_file():
            raise ConfigError(f"dataset {dataset} does not exist")
        self.dataset = dataset
        self.dataset_sha = file_sha256(dataset)
        self.chash = config_hash(cfg)
        self.run_key = run_key_for(cfg, self.dataset_sha)

        self.schema = load_schema(cfg.schema) if cfg.schema else DEFAULT_SCHEMA
        requested = tuple(cfg.features) if cfg.features else tuple(self.schema.feature_columns)
        for name in requested:
            if name not in self.schema.feature_columns:
                raise ConfigError(f"{name!r} is not a feature column of the schema")
        self.requested = requested

        # filled in by steps
        self.table = None
        self.encoders = []
        self.matrix = None
        self.labels = None
        self.class_names = {}
        self.kept = requested
        self.selection = None
        self.split = None
        self.X_train = self.X_test = None
        self.y_train = self.y_test = None
        self.models = {}
        self.reports = {}
        self.comparison = None

    # -- step driver ---------------------------------------------------

    def _fresh(self, stage: str, name: str) -> bool:
        entry = find_entry(self.ws, stage, name)
        if entry is None or entry.get("config") != self.run_key:
            return False
        path = self.ws.stage_path(stage, name)
        return path.is_file() and file_sha256(path) == entry["sha256"]

    def _step(self, name: str, outputs, execute, load=None, enabled=True) -> None:
        if not enabled:
            self.statuses.append((name, "disabled"))
            return
        if self.reuse and outputs and all(self._fresh(s, n) for s, n in outputs):
            if load is not None:
                load()
            self.statuses.append((name, "reused"))
            return
        try:
            execute()
            for stage, fname in outputs:
                record_file(self.ws, stage, fname, name, self.run_key)
        except Exception as exc:
            for stage, fname in outputs:
                remove_file(self.ws, stage, fname)
            raise PipelineStepError(name, exc) from exc
        self.statuses.append((name, "ran"))

    # -- ingest ----------------------------------------------------------

    def step_ingest(self):
        def execute():
            shutil.copyfile(self.dataset, self.ws.stage_path("raw", "dataset.csv"))

        self._step("ingest", [("raw", "dataset.csv")], execute)

    # -- curate: parse, fit encoders, assemble the design matrix ----------

    def _assemble(self):
        eff = replace(self.schema, feature_columns=self.requested)
        self.matrix, self.labels = assemble(self.table, eff, self.encoders, self.cfg.target)
        if self.cfg.target == "binary_label":
            self.class_names = {0: "Benign", 1: "Attack"}
        else:
            by_col = {e.column: e for e in self.encoders}
            attack = by_col.get(self.schema.attack_column)
            if attack is not None:
                self.class_names = {code: str(v) for v, code in attack.mapping.items()}
        self.class_names = {
            c: self.class_names.get(c, str(c)) for c in sorted(set(self.labels.values.tolist()))
        }

    def step_curate(self):
        raw_path = self.ws.stage_path("raw", "dataset.csv")
        outputs = [("curated", "curated.csv"), ("curated", "encoders.json")]
        encoded = list(self.requested)
        if self.schema.attack_column and self.schema.attack_column not in encoded:
            encoded.append(self.schema.attack_column)
        kinds = {name: self.schema.kind_of(name) for name in encoded}

        def execute():
            self.table = load_flow_csv(raw_path, self.schema)
            self.encoders = [fit_encoder(self.table, name) for name in encoded]
            codes = {e.column: e for e in self.encoders}
            with open(self.ws.stage_path("curated", "curated.csv"), "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                names = list(self.schema.names())
                writer.writerow(names + [f"{c}__code" for c in encoded])
                col_kinds = [self.schema.kind_of(n) for n in names]
                encoded_cols = [
                    [codes[c].mapping[v] for v in self.table.column(c)] for c in encoded
                ]
                for i, row in enumerate(self.table.rows):
                    cells = [_fmt_cell(v, k) for v, k in zip(row, col_kinds)]
                    writer.writerow(cells + [col[i] for col in encoded_cols])
            _save_encoders(self.encoders, kinds, self.ws.stage_path("curated", "encoders.json"))
            self._assemble()

        def load():
            self.table = load_flow_csv(raw_path, self.schema)
            self.encoders = _load_encoders(self.ws.stage_path("curated", "encoders.json"))
            self._assemble()

        self._step("curate", outputs, execute, load)

    # -- eda: distribution, histograms, correlation, selection ------------

    def step_eda(self):
        results = [("results", "class_distribution.csv")]
        results += [("results", f"hist_{n}.csv") for n in self.requested]
        results += [("results", "correlation.csv"), ("results", "selection.json")]
        sel_path = self.ws.stage_path("results", "selection.json")

        def apply_selection(kept, dropped):
            self.kept = tuple(kept)
            self.selection = {"kept": list(kept), "dropped": [list(d) for d in dropped]}

        def execute():
            dist = class_distribution(self.labels)
            write_class_distribution_csv(
                dist, self.ws.stage_path("results", "class_distribution.csv"), self.class_names
            )
            for j, name in enumerate(self.requested):
                hist = histogram(self.matrix.values[:, j], bins=self.cfg.bins, column=name)
                write_histogram_csv(hist, self.ws.stage_path("results", f"hist_{name}.csv"))
            corr = pearson(self.matrix)
            write_correlation_csv(corr, self.ws.stage_path("results", "correlation.csv"))
            if corr.degenerate:
                cols = ", ".join(sorted(corr.degenerate))
                self.warnings.append(f"eda: zero-variance feature columns: {cols}")
            sel = drop_correlated(corr, self.cfg.correlation_threshold)
            doc = {
                "threshold": sel.threshold,
                "kept": list(sel.kept),
                "dropped": [[n, p, r] for n, p, r in sel.dropped],
                "degenerate": sorted(corr.degenerate),
            }
            with open(sel_path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
            apply_selection(sel.kept, sel.dropped)

        def load():
            with open(sel_path, encoding="utf-8") as fh:
                doc = json.load(fh)
            apply_selection(doc["kept"], doc["dropped"])

        self._step("eda", results, execute, load, enabled=self.cfg.eda)

    # -- split -------------------------------------------------------------

    def _slice(self, indices) -> "tuple[FeatureMatrix, LabelVector]":
        cols = [self.requested.index(n) for n in self.kept]
        values = self.matrix.values[np.asarray(indices, dtype=np.int64)][:, cols]
        X = FeatureMatrix(names=tuple(self.kept), values=values)
        y = LabelVector(
            values=self.labels.values[np.asarray(indices, dtype=np.int64)],
            semantics=self.labels.semantics,
        )
        return X, y

    def step_split(self):
        path = self.ws.stage_path("results", "split.json")

        def execute():
            self.split = stratified_split(self.labels, self.cfg.test_fraction, self.cfg.seed)
            save_split(self.split, path)

        def load():
            self.split = load_split(path)

        self._step("split", [("results", "split.json")], execute, load)
        self.X_train, self.y_train = self._slice(self.split.train)
        self.X_test, self.y_test = self._slice(self.split.test)

    # -- resample: oversample the training partition only -------------------

    def step_resample(self):
        csv_path = self.ws.stage_path("curated", "train_resampled.csv")
        json_path = self.ws.stage_path("results", "resample.json")
        outputs = [("curated", "train_resampled.csv"), ("results", "resample.json")]

        def note_single_class():
            self.warnings.append("resample: single-class training labels, nothing to balance")

        def execute():
            before = class_distribution(self.y_train)
            rs = smote(self.X_train, self.y_train, k=self.cfg.smote_k, seed=self.cfg.seed)
            if rs.single_class:
                note_single_class()
            self.X_train, self.y_train = rs.X, rs.y
            after = class_distribution(self.y_train)
            with open(csv_path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(list(self.kept) + ["target"])
                for row, label in zip(rs.X.values, rs.y.values):
                    writer.writerow([repr(float(v)) for v in row] + [int(label)])
            doc = {
                "before": {str(c): n for c, n in before.items()},
                "after": {str(c): n for c, n in after.items()},
                "synthetic_rows": len(rs.synthetic_from),
                "single_class": rs.single_class,
            }
            with open(json_path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")

        def load():
            with open(csv_path, newline="", encoding="utf-8") as fh:
                reader = csv.reader(fh)
                next(reader)
                rows = [r for r in reader if r]
            values = np.asarray([[float(v) for v in r[:-1]] for r in rows], dtype=np.float64)
            labels = np.asarray([int(r[-1]) for r in rows], dtype=np.int64)
            if values.size == 0:
                values = values.reshape(0, len(self.kept))
            self.X_train = FeatureMatrix(names=tuple(self.kept), values=values)
            self.y_train = LabelVector(values=labels, semantics=self.labels.semantics)
            with open(json_path, encoding="utf-8") as fh:
                if json.load(fh).get("single_class"):
                    note_single_class()

        self._step("resample", outputs, execute, load, enabled=self.cfg.smote)

    # -- scale ---------------------------------------------------------------

    def step_scale(self):
        path = self.ws.stage_path("models", "scaler.json")

        def apply(scaler):
            self.X_train = apply_scaler(scaler, self.X_train)
            self.X_test = apply_scaler(scaler, self.X_test)

        def execute():
            scaler = fit_scaler(self.X_train)
            save_scaler(scaler, path)
            apply(scaler)

        def load():
            apply(load_scaler(path))

        self._step("scale", [("models", "scaler.json")], execute, load, enabled=self.cfg.scale)

    # -- train / evaluate / compare -------------------------------------------

    def step_train(self):
        outputs = [("models", f"{name}.json") for name in self.enabled]

        def execute():
            for name in self.enabled:
                model = fit_family(
                    name, self.X_train, self.y_train, seed=self.cfg.seed, hyper=self.cfg.models[name]
                )
                save_model(model, self.ws.stage_path("models", f"{name}.json"))
                self.models[name] = model

        def load():
            for name in self.enabled:
                self.models[name] = load_model(self.ws.stage_path("models", f"{name}.json"))

        self._step("train", outputs, execute, load)

    def step_evaluate(self):
        outputs = [("results", f"eval_{name}.json") for name in self.enabled]

        def execute():
            for name in self.enabled:
                pred = predict(self.models[name], self.X_test)
                cm = confusion(self.y_test.values, pred)
                report = score(cm, model=DISPLAY_NAMES[name])
                save_report(report, self.ws.stage_path("results", f"eval_{name}.json"))
                self.reports[name] = report

        def load():
            for name in self.enabled:
                self.reports[name] = load_report(self.ws.stage_path("results", f"eval_{name}.json"))

        self._step("evaluate", outputs, execute, load)

    def _summary_doc(self) -> dict:
        dist = class_distribution(self.labels)
        return {
            "config": self.chash,
            "run_key": self.run_key,
            "seed": self.cfg.seed,
            "target": self.cfg.target,
            "test_fraction": self.cfg.test_fraction,
            "smote": self.cfg.smote,
            "smote_k": self.cfg.smote_k,
            "scale": self.cfg.scale,
            "correlation_threshold": self.cfg.correlation_threshold,
            "bins": self.cfg.bins,
            "eda": self.cfg.eda,
            "dataset": {
                "name": self.dataset.name,
                "bytes": self.dataset.stat().st_size,
                "sha256": self.dataset_sha,
            },
            "features": {
                "requested": list(self.requested),
                "kept": list(self.kept),
                "dropped": (self.selection or {}).get("dropped", []),
            },
            "models": list(self.enabled),
            "rows": {
                "total": self.table.row_count,
                "train": len(self.split.train),
                "test": len(self.split.test),
                "train_after_resample": int(len(self.y_train)),
            },
            "class_counts": {str(c): n for c, n in dist.items()},
            "class_names": {str(c): self.class_names.get(c, str(c)) for c in dist},
            "warnings": list(self.warnings),
        }

    def step_compare(self):
        outputs = [
            ("results", "comparison.csv"),
            ("results", "comparison.txt"),
            ("results", "summary.json"),
        ]

        def table():
            self.comparison = compare([self.reports[name] for name in self.enabled])

        def execute():
            table()
            write_comparison_csv(self.comparison, self.ws.stage_path("results", "comparison.csv"))
            with open(self.ws.stage_path("results", "comparison.txt"), "w", encoding="utf-8") as fh:
                fh.write(render_comparison_text(self.comparison))
            with open(self.ws.stage_path("results", "summary.json"), "w", encoding="utf-8") as fh:
                json.dump(self._summary_doc(), fh, indent=2, sort_keys=True)
                fh.write("\n")

        self._step("compare", outputs, execute, load=table)

    def step_report(self):
        figures = []
        if self.cfg.eda:
            figures.append("fig_class_distribution.png")
            figures += [f"fig_hist_{n}.png" for n in self.requested]
            figures.append("fig_correlation.png")
        figures.append("fig_comparison.png")
        outputs = [("report", "index.html")] + [("results", f) for f in figures]

        def execute():
            emit_report(self.ws, stable=True, figures=True)

        self._step("report", outputs, execute)

    def run(self, until: str = "report") -> RunSummary:
        if until not in STEPS:
            raise ConfigError(f"unknown step {until!r}")
        methods = {
            "ingest": self.step_ingest,
            "curate": self.step_curate,
            "eda": self.step_eda,
            "split": self.step_split,
            "resample": self.step_resample,
            "scale": self.step_scale,
            "train": self.step_train,
            "evaluate": self.step_evaluate,
            "compare": self.step_compare,
            "report": self.step_report,
        }
        for name in STEPS:
            methods[name]()
            if name == until:
                break
        return RunSummary(
            config=self.chash,
            run_key=self.run_key,
            seed=self.cfg.seed,
            steps=tuple(self.statuses),
            models=tuple(self.enabled),
            comparison=self.comparison,
            report_path=str(self.ws.stage_path("report", "index.html")),
            warnings=tuple(self.warnings),
        )


def prepare_data(ws: Workspace, cfg: RunConfig, reuse: bool = True) -> _Run:
    """Run the data-side steps (through scaling) and return the context.

    The context carries X_train/y_train/X_test/y_test plus the encoders and
    split, which is what standalone evaluation of a persisted model needs.
    reuse defaults True so a workspace populated by an earlier run is read,
    not rewritten.
    """
    cfg.validate()
    init_workspace(ws.root)
    run = _Run(ws, cfg, reuse)
    with workspace_lock(ws):
        run.run("scale")
    return run


def run_pipeline(ws: Workspace, cfg: RunConfig, reuse: bool = False, until: str = "report") -> RunSummary:
    """Execute (or with reuse=True, resume) a pipeline run.

    until names the last step executed; the default runs everything. The
    caller gets back the in-memory summary; on-disk artifacts live in the
    workspace stages.
    """
    cfg.validate()
    if not cfg.enabled_models():
        raise ConfigError("no models enabled")
    init_workspace(ws.root)
    run = _Run(ws, cfg, reuse)
    with workspace_lock(ws):
        return run.run(until)
