"""Staged local pipeline: workspace, config, run steps, queries, report."""

from .config import RunConfig, config_from_dict, config_hash, default_models, load_run_config
from .query import (
    And,
    Comparison,
    Not,
    Or,
    QueryExpr,
    bind_query,
    eval_query,
    load_stage_table,
    parse_query,
    render_query,
)
from .report import emit_report
from .run import DISPLAY_NAMES, STEPS, RunSummary, prepare_data, run_key_for, run_pipeline
from .synthetic import class_counts, generate_synthetic, write_synthetic
from .workspace import (
    STAGES,
    Workspace,
    file_sha256,
    find_entry,
    init_workspace,
    manifest_hashes,
    read_manifest,
    record_file,
    remove_file,
    workspace_lock,
)

__all__ = [
    "RunConfig",
    "config_from_dict",
    "config_hash",
    "default_models",
    "load_run_config",
    "Comparison",
    "And",
    "Or",
    "Not",
    "QueryExpr",
    "parse_query",
    "render_query",
    "bind_query",
    "eval_query",
    "load_stage_table",
    "emit_report",
    "RunSummary",
    "run_pipeline",
    "prepare_data",
    "run_key_for",
    "DISPLAY_NAMES",
    "STEPS",
    "generate_synthetic",
    "write_synthetic",
    "class_counts",
    "STAGES",
    "Workspace",
    "init_workspace",
    "file_sha256",
    "read_manifest",
    "record_file",
    "find_entry",
    "remove_file",
    "manifest_hashes",
    "workspace_lock",
]
