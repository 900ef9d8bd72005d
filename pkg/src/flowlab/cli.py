"""Command-line entry point.

One binary, ten subcommands: inspect, eda, split, train, evaluate,
compare, query, run, report, synth. Human-readable output goes to stdout
and diagnostics to stderr; every subcommand also supports --json, which
prints exactly one JSON document with a "status" field.

Exit codes: 0 success, 1 usage or data error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .eda import (
    class_distribution,
    drop_correlated,
    histogram,
    pearson,
    write_class_distribution_csv,
    write_correlation_csv,
    write_histogram_csv,
)
from .errors import ConfigError, FlowlabError, MissingResults, QuerySyntaxError
from .flowdata import (
    DEFAULT_SCHEMA,
    FeatureMatrix,
    encode,
    fit_encoder,
    load_flow_csv,
    load_schema,
)
from .learners import load_model, predict
from .metrics import (
    compare,
    confusion,
    load_report,
    render_comparison_text,
    render_report_text,
    report_to_dict,
    score,
)
from .pipeline import (
    RunConfig,
    Workspace,
    class_counts,
    config_from_dict,
    emit_report,
    eval_query,
    load_run_config,
    parse_query,
    prepare_data,
    read_manifest,
    record_file,
    run_pipeline,
    write_synthetic,
)
from .sampling import save_split, stratified_split

_ALGO_NAMES = {
    "naive_bayes": "Naive Bayes",
    "knn": "KNN",
    "decision_tree": "Decision Tree",
    "random_forest": "Random Forest",
    "adaboost": "AdaBoost",
}


class _UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on bad flags; raise instead so main owns
    # the exit-code contract
    def error(self, message):
        raise _UsageError(self, message)


def _bold(text: str) -> str:
    if os.environ.get("NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[1m{text}\x1b[0m"


def _say(args, text: str = "") -> None:
    if not args.json:
        print(text)


def _schema_for(args):
    return load_schema(args.schema) if getattr(args, "schema", None) else DEFAULT_SCHEMA


def _config_for(args) -> RunConfig:
    """defaults < config file < flags, then validate."""
    if getattr(args, "config", None):
        cfg = load_run_config(args.config)
    elif getattr(args, "dataset", None):
        cfg = config_from_dict({"dataset": args.dataset})
    else:
        raise ConfigError("a dataset argument or --config file is required")
    if getattr(args, "dataset", None) and args.config:
        cfg.dataset = str(Path(args.dataset))
    for flag, attr in (
        ("seed", "seed"),
        ("smote", "smote"),
        ("scale", "scale"),
        ("threshold", "correlation_threshold"),
        ("test_fraction", "test_fraction"),
        ("workspace", "workspace"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    cfg.validate()
    return cfg


def _workspace_for(args) -> Workspace:
    root = getattr(args, "workspace", None) or "workspace"
    return Workspace(root=Path(root))


# -- subcommand handlers; each prints human output unless --json and returns
# -- the machine-readable document


def cmd_inspect(args) -> dict:
    schema = _schema_for(args)
    table = load_flow_csv(args.csv, schema, lenient=args.lenient)
    doc = {
        "status": "ok",
        "columns": [[n, k] for n, k in schema.columns],
        "features": list(schema.feature_columns),
        "rows": table.row_count,
        "skipped": table.skipped,
    }
    if schema.label_column is not None:
        dist = class_distribution(int(v) for v in table.column(schema.label_column))
        doc["class_counts"] = {str(c): n for c, n in dist.items()}
    _say(args, _bold(f"{args.csv}"))
    _say(args, f"rows: {table.row_count}" + (f" (skipped {table.skipped})" if table.skipped else ""))
    _say(args, "columns:")
    for n, k in schema.columns:
        role = " [feature]" if n in schema.feature_columns else ""
        role = role or (" [label]" if n == schema.label_column else "")
        role = role or (" [attack]" if n == schema.attack_column else "")
        _say(args, f"  {n}: {k}{role}")
    if "class_counts" in doc:
        _say(args, "class counts:")
        for c, n in doc["class_counts"].items():
            _say(args, f"  {c}: {n}")
    return doc


def cmd_eda(args) -> dict:
    from .figures import save_class_distribution_png, save_heatmap_png, save_histogram_png

    schema = _schema_for(args)
    table = load_flow_csv(args.csv, schema)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    encoders = [fit_encoder(table, name) for name in schema.feature_columns]
    cols = [encode(e, table.column(e.column)) for e in encoders]
    values = np.column_stack(cols) if cols else np.zeros((table.row_count, 0))
    X = FeatureMatrix(names=tuple(schema.feature_columns), values=values)

    if schema.label_column is not None:
        dist = class_distribution(int(v) for v in table.column(schema.label_column))
        write_class_distribution_csv(dist, out / "class_distribution.csv")
        save_class_distribution_png(dist, out / "class_distribution.png")
        files += ["class_distribution.csv", "class_distribution.png"]

    for j, name in enumerate(X.names):
        hist = histogram(X.values[:, j], bins=args.bins, column=name)
        write_histogram_csv(hist, out / f"hist_{name}.csv")
        save_histogram_png(hist, out / f"hist_{name}.png", title=name)
        files += [f"hist_{name}.csv", f"hist_{name}.png"]

    corr = pearson(X)
    write_correlation_csv(corr, out / "correlation.csv")
    save_heatmap_png(corr, out / "correlation.png")
    files += ["correlation.csv", "correlation.png"]
    sel = drop_correlated(corr, args.threshold if args.threshold is not None else 0.9)
    with open(out / "selection.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "threshold": sel.threshold,
                "kept": list(sel.kept),
                "dropped": [[n, p, r] for n, p, r in sel.dropped],
                "degenerate": sorted(corr.degenerate),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    files.append("selection.json")

    for name in files:
        _say(args, f"wrote {out / name}")
    if sel.dropped:
        drops = ", ".join(f"{n} (with {p})" for n, p, _ in sel.dropped)
        _say(args, f"suggested drops at threshold {sel.threshold}: {drops}")
    return {"status": "ok", "out": str(out), "files": files, "kept": list(sel.kept)}


def cmd_split(args) -> dict:
    schema = _schema_for(args)
    table = load_flow_csv(args.csv, schema)
    if schema.label_column is None:
        raise ConfigError("schema declares no label column to stratify on")
    labels = np.asarray([int(v) for v in table.column(schema.label_column)], dtype=np.int64)
    split = stratified_split(labels, args.test_fraction, args.seed if args.seed is not None else 7)
    save_split(split, args.out)
    _say(args, f"wrote {args.out}")
    _say(args, f"train rows: {len(split.train)}")
    _say(args, f"test rows:  {len(split.test)}")
    return {
        "status": "ok",
        "out": str(args.out),
        "train_rows": len(split.train),
        "test_rows": len(split.test),
        "seed": split.seed,
        "test_fraction": split.test_fraction,
    }


def _summary_doc(summary, stable: bool) -> dict:
    doc = {
        "status": "ok",
        "config": summary.config,
        "run_key": summary.run_key,
        "seed": summary.seed,
        "steps": [[name, status] for name, status in summary.steps],
        "models": list(summary.models),
        "warnings": list(summary.warnings),
    }
    if summary.comparison is not None:
        doc["comparison"] = [
            {
                "model": r.model,
                "accuracy": r.accuracy,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
            }
            for r in summary.comparison.rows
        ]
    if not stable:
        doc["finished_at"] = datetime.now(timezone.utc).isoformat()
    return doc


def _print_summary(args, summary, report_path=None) -> None:
    _say(args, _bold("steps"))
    for name, status in summary.steps:
        _say(args, f"  {name:<9} {status}")
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if summary.comparison is not None:
        _say(args)
        _say(args, render_comparison_text(summary.comparison).rstrip("\n"))
    if report_path:
        _say(args)
        _say(args, f"report: {report_path}")


def cmd_run(args) -> dict:
    cfg = _config_for(args)
    ws = Workspace(root=Path(cfg.workspace))
    summary = run_pipeline(ws, cfg, reuse=args.reuse)
    _print_summary(args, summary, report_path=summary.report_path)
    doc = _summary_doc(summary, args.stable)
    doc["report"] = summary.report_path
    return doc


def cmd_train(args) -> dict:
    cfg = _config_for(args)
    if args.model != "all":
        for name in cfg.models:
            cfg.models[name]["enabled"] = name == args.model
    ws = Workspace(root=Path(cfg.workspace))
    summary = run_pipeline(ws, cfg, reuse=args.reuse, until="compare")
    _print_summary(args, summary)
    models_dir = ws.stage_dir("models")
    _say(args)
    for name in summary.models:
        _say(args, f"model: {models_dir / (name + '.json')}")
    return _summary_doc(summary, args.stable)


def cmd_evaluate(args) -> dict:
    cfg = _config_for(args)
    ws = Workspace(root=Path(cfg.workspace))
    model = load_model(args.model_file)
    ctx = prepare_data(ws, cfg)
    pred = predict(model, ctx.X_test)
    cm = confusion(ctx.y_test.values, pred)
    report = score(cm, model=_ALGO_NAMES.get(model.algorithm, model.algorithm))
    _say(args, render_report_text(report).rstrip("\n"))
    doc = report_to_dict(report)
    doc["status"] = "ok"
    doc["model_file"] = str(args.model_file)
    return doc


def cmd_compare(args) -> dict:
    ws = _workspace_for(args)
    names = [
        e["name"]
        for e in read_manifest(ws, "results")["entries"]
        if e["name"].startswith("eval_") and e["name"].endswith(".json")
    ]
    if not names:
        raise MissingResults("no evaluation reports in the results stage; train first")
    reports = [load_report(ws.stage_path("results", name)) for name in names]
    table = compare(reports)
    _say(args, render_comparison_text(table).rstrip("\n"))
    return {
        "status": "ok",
        "comparison": [
            {
                "model": r.model,
                "accuracy": r.accuracy,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
            }
            for r in table.rows
        ],
    }


def cmd_query(args) -> dict:
    ws = _workspace_for(args)
    expr = parse_query(args.expr)
    projection = [c.strip() for c in args.project.split(",")] if args.project else None
    table, count = eval_query(ws, args.stage, args.file, expr, projection)
    shown = table.rows if args.limit is None else table.rows[: args.limit]
    if not args.json:
        print(f"matched {count} of {args.stage}/{args.file}")
        print(",".join(table.schema.names()))
        for row in shown:
            print(",".join(str(v) for v in row))
        if len(shown) < count:
            print(f"... {count - len(shown)} more rows", file=sys.stderr)
    return {
        "status": "ok",
        "count": count,
        "columns": list(table.schema.names()),
        "rows": [list(row) for row in shown],
    }


def cmd_report(args) -> dict:
    ws = _workspace_for(args)
    summary_path = ws.stage_path("results", "summary.json")
    if not summary_path.is_file():
        raise MissingResults("results/summary.json not found; run the pipeline first")
    with open(summary_path, encoding="utf-8") as fh:
        run_key = json.load(fh)["run_key"]
    written = emit_report(ws, stable=args.stable)
    for stage, names in written.items():
        for name in names:
            record_file(ws, stage, name, "report", run_key)
    path = ws.stage_path("report", "index.html")
    _say(args, f"report: {path}")
    doc = {"status": "ok", "report": str(path), "figures": written["results"]}
    if not args.stable:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    return doc


def cmd_synth(args) -> dict:
    try:
        weights = tuple(float(w) for w in args.weights.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse weights {args.weights!r}") from None
    write_synthetic(args.out, args.rows, weights, args.seed if args.seed is not None else 7)
    benign, attack = class_counts(args.rows, weights)
    _say(args, f"wrote {args.out} ({args.rows} rows: {benign} benign, {attack} attack)")
    return {
        "status": "ok",
        "out": str(args.out),
        "rows": args.rows,
        "class_counts": {"0": benign, "1": attack},
        "seed": args.seed if args.seed is not None else 7,
    }


def build_parser() -> _Parser:
    parser = _Parser(prog="flowlab", description="Network-flow classification toolkit")
    parser.add_argument("--version", action="version", version=f"flowlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=handler)
        p.add_argument("--json", action="store_true", help="emit one JSON document")
        return p

    p = add("inspect", cmd_inspect, "show schema and class distribution of a CSV")
    p.add_argument("csv")
    p.add_argument("--schema", help="schema JSON file (default: built-in flow layout)")
    p.add_argument("--lenient", action="store_true", help="skip malformed rows instead of failing")

    p = add("eda", cmd_eda, "write histograms, correlation heatmap, and class counts to files")
    p.add_argument("csv")
    p.add_argument("--schema")
    p.add_argument("--out", default="eda_out", help="output directory (default: eda_out)")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--threshold", type=float, default=None, help="correlation drop threshold")

    p = add("split", cmd_split, "write a seeded stratified train/test split")
    p.add_argument("csv")
    p.add_argument("--schema")
    p.add_argument("--test-fraction", dest="test_fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="split.json")

    def add_config_flags(p, dataset_optional=True):
        if dataset_optional:
            p.add_argument("dataset", nargs="?", help="flow CSV (or use --config)")
        p.add_argument("--config", help="run configuration (.toml or .json)")
        p.add_argument("--workspace", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--smote", action=argparse.BooleanOptionalAction, default=None)
        p.add_argument("--scale", action=argparse.BooleanOptionalAction, default=None)
        p.add_argument("--threshold", type=float, default=None, help="correlation drop threshold")
        p.add_argument("--test-fraction", dest="test_fraction", type=float, default=None)
        p.add_argument("--reuse", action="store_true", help="skip steps whose artifacts are fresh")
        p.add_argument("--stable", action="store_true", help="omit timestamps from output")

    p = add("train", cmd_train, "train models and evaluate them on the test split")
    p.add_argument("--model", choices=["nb", "knn", "rf", "ada", "all"], default="all")
    add_config_flags(p)

    p = add("evaluate", cmd_evaluate, "score a saved model file on the test split")
    p.add_argument("--model-file", dest="model_file", required=True)
    add_config_flags(p)

    p = add("compare", cmd_compare, "print the model comparison table for a workspace")
    p.add_argument("--workspace", default=None)

    p = add("query", cmd_query, "filter a stage table with a boolean expression")
    p.add_argument("expr")
    p.add_argument("--workspace", default=None)
    p.add_argument("--stage", default="curated")
    p.add_argument("--file", default="curated.csv")
    p.add_argument("--project", default=None, help="comma-separated output columns")
    p.add_argument("--limit", type=int, default=None, help="cap the rows shown")

    p = add("run", cmd_run, "execute the full pipeline: ingest through report")
    add_config_flags(p)

    p = add("report", cmd_report, "regenerate report/index.html from a populated workspace")
    p.add_argument("--workspace", default=None)
    p.add_argument("--stable", action="store_true", help="omit timestamps from output")

    p = add("synth", cmd_synth, "generate a deterministic synthetic flow CSV")
    p.add_argument("--out", default="synthetic.csv")
    p.add_argument("--rows", type=int, default=1000)
    p.add_argument("--weights", default="0.9,0.1")
    p.add_argument("--seed", type=int, default=None)

    return parser


def _emit_json(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(sys.argv[1:] if argv is None else list(argv))
    except _UsageError as exc:
        print(exc.parser.format_usage(), end="", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1

    json_mode = getattr(args, "json", False)
    try:
        doc = args.func(args)
    except QuerySyntaxError as exc:
        if json_mode:
            _emit_json(
                {
                    "status": "error",
                    "error": type(exc).__name__,
                    "message": str(exc),
                    "position": exc.position,
                    "expected": list(exc.expected),
                }
            )
        else:
            print(f"error: {exc}", file=sys.stderr)
            expr = getattr(args, "expr", None)
            if expr is not None:
                print(f"  {expr}", file=sys.stderr)
                print("  " + " " * exc.position + "^", file=sys.stderr)
        return 1
    except FlowlabError as exc:
        if json_mode:
            _emit_json({"status": "error", "error": type(exc).__name__, "message": str(exc)})
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # a bug, not a data problem
        if json_mode:
            _emit_json({"status": "error", "error": type(exc).__name__, "message": str(exc)})
        else:
            print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if json_mode:
        _emit_json(doc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
