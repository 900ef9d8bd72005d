"""Staged on-disk workspace with per-stage provenance manifests.

Layout: <root>/{raw,curated,models,results,report}, one manifest.json per
stage. Each manifest entry records file name, byte size, SHA-256 content
hash (the fixed, named hash of the format), ISO-8601 creation timestamp,
producing step name, and the config hash of the run that wrote it. A lock
file at the root gives a running pipeline exclusive ownership.
"""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import WorkspaceError

STAGES = ("raw", "curated", "models", "results", "report")
_MANIFEST = "manifest.json"
_LOCK = ".lock"


@dataclass(frozen=True)
class Workspace:
    root: Path

    def stage_dir(self, stage: str) -> Path:
        if stage not in STAGES:
            raise WorkspaceError(f"unknown stage {stage!r}")
        return self.root / stage

    def stage_path(self, stage: str, name: str) -> Path:
        return self.stage_dir(stage) / name

    def manifest_path(self, stage: str) -> Path:
        return self.stage_dir(stage) / _MANIFEST


def init_workspace(root) -> Workspace:
    """Create the stage layout; idempotent on re-run."""
    root = Path(root)
    if root.exists() and not root.is_dir():
        raise WorkspaceError(f"{root} exists and is not a directory")
    try:
        root.mkdir(parents=True, exist_ok=True)
        ws = Workspace(root=root)
        for stage in STAGES:
            ws.stage_dir(stage).mkdir(exist_ok=True)
            manifest = ws.manifest_path(stage)
            if not manifest.exists():
                _write_manifest_doc(manifest, {"stage": stage, "entries": []})
    except OSError as exc:
        raise WorkspaceError(f"cannot initialize workspace at {root}: {exc}") from None
    return ws


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest_doc(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(ws: Workspace, stage: str) -> dict:
    path = ws.manifest_path(stage)
    if not path.exists():
        raise WorkspaceError(f"stage {stage!r} has no manifest; is {ws.root} a workspace?")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def record_file(ws: Workspace, stage: str, name: str, step: str, config_hash: str) -> dict:
    """Hash a freshly written stage file into its manifest.

    An existing entry with the same name is replaced; entries are kept
    sorted by file name so manifests are deterministic.
    """
    path = ws.stage_path(stage, name)
    if not path.is_file():
        raise WorkspaceError(f"cannot record missing file {path}")
    entry = {
        "name": name,
        "bytes": path.stat().st_size,
        "sha256": file_sha256(path),
        "created_at": datetime.now(timezone.utc).isoformat(),
        "step": step,
        "config": config_hash,
    }
    doc = read_manifest(ws, stage)
    doc["entries"] = [e for e in doc["entries"] if e["name"] != name] + [entry]
    doc["entries"].sort(key=lambda e: e["name"])
    _write_manifest_doc(ws.manifest_path(stage), doc)
    return entry


def find_entry(ws: Workspace, stage: str, name: str):
    for entry in read_manifest(ws, stage)["entries"]:
        if entry["name"] == name:
            return entry
    return None


def remove_file(ws: Workspace, stage: str, name: str) -> None:
    """Drop a file and its manifest entry, tolerating absence of either."""
    path = ws.stage_path(stage, name)
    if path.exists():
        path.unlink()
    doc = read_manifest(ws, stage)
    remaining = [e for e in doc["entries"] if e["name"] != name]
    if len(remaining) != len(doc["entries"]):
        doc["entries"] = remaining
        _write_manifest_doc(ws.manifest_path(stage), doc)


def manifest_hashes(ws: Workspace, stage: str) -> dict:
    """name -> (bytes, sha256) view used for manifest comparison."""
    return {e["name"]: (e["bytes"], e["sha256"]) for e in read_manifest(ws, stage)["entries"]}


@contextmanager
def workspace_lock(ws: Workspace):
    """Exclusive ownership of the workspace for one pipeline run."""
    lock = ws.root / _LOCK
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise WorkspaceError(
            f"workspace {ws.root} is locked by another run (remove {lock} if stale)"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        if lock.exists():
            lock.unlink()
