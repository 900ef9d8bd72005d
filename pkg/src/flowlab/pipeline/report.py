"""Static HTML report over a populated results stage.

The report is a single self-contained file (inline SVG and CSS, no external
references). Everything it shows is re-read from the results artifacts, so
it can be regenerated at any time from a workspace that has completed a
run. PNG versions of the charts are rendered next to the delimited files
in the results stage for use outside the report.

Content is deterministic for a given results stage; stable=True drops the
only wall-clock element (the generated-at footer), which is how the
pipeline itself emits it so that report bytes depend on inputs alone.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone

import numpy as np

from ..errors import MissingResults
from ..eda import CorrelationMatrix, Histogram
from ..metrics import ComparisonRow, ComparisonTable
from ..svgchart import bar_chart_svg, heatmap_svg, histogram_svg, _esc
from .workspace import Workspace

_CSS = """\
body { font-family: sans-serif; margin: 2em auto; max-width: 60em; color: #222; }
h1 { border-bottom: 2px solid #444; padding-bottom: 0.2em; }
h2 { margin-top: 2em; color: #333; }
table { border-collapse: collapse; margin: 1em 0; }
th, td { border: 1px solid #999; padding: 0.3em 0.8em; text-align: left; }
th { background: #eee; }
td.num { text-align: right; font-variant-numeric: tabular-nums; }
.note { color: #555; font-style: italic; }
.prov td:first-child { font-weight: bold; }
footer { margin-top: 3em; color: #777; font-size: 0.85em; }
svg { margin: 0.5em 0; }
"""


def _require(path, what: str):
    if not path.is_file():
        raise MissingResults(f"{what} not found at {path}; run the pipeline first")
    return path


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _read_rows(path) -> "tuple[list, list]":
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def _read_comparison(path) -> ComparisonTable:
    _, rows = _read_rows(path)
    return ComparisonTable(
        rows=tuple(
            ComparisonRow(
                model=r[0],
                accuracy=float(r[1]),
                precision=float(r[2]),
                recall=float(r[3]),
                f1=float(r[4]),
            )
            for r in rows
        )
    )


def _read_class_distribution(path) -> "tuple[dict, dict]":
    _, rows = _read_rows(path)
    dist = {int(r[0]): int(r[2]) for r in rows}
    names = {int(r[0]): r[1] for r in rows}
    return dist, names


def _read_histogram(path, column: str) -> Histogram:
    _, rows = _read_rows(path)
    edges = [float(r[0]) for r in rows] + [float(rows[-1][1])]
    counts = [int(r[2]) for r in rows]
    return Histogram(column=column, bin_edges=tuple(edges), counts=tuple(counts))


def _read_correlation(path, degenerate) -> CorrelationMatrix:
    header, rows = _read_rows(path)
    names = tuple(header[1:])
    r = np.asarray([[float(v) for v in row[1:]] for row in rows], dtype=np.float64)
    return CorrelationMatrix(names=names, r=r, degenerate=frozenset(degenerate))


def _metric_cell(v: float) -> str:
    return f'<td class="num">{v:.4f}</td>'


def _comparison_html(table: ComparisonTable) -> str:
    out = [
        "<table>",
        "<tr><th>Model</th><th>Accuracy</th><th>Precision</th><th>Recall</th><th>F1-score</th></tr>",
    ]
    for row in table.rows:
        out.append(
            f"<tr><td>{_esc(row.model)}</td>"
            + _metric_cell(row.accuracy)
            + _metric_cell(row.precision)
            + _metric_cell(row.recall)
            + _metric_cell(row.f1)
            + "</tr>"
        )
    out.append("</table>")
    return "\n".join(out)


def _confusion_html(doc: dict) -> str:
    classes = doc["confusion"]["classes"]
    counts = doc["confusion"]["counts"]
    out = ["<table>"]
    out.append(
        "<tr><th>true \\ predicted</th>"
        + "".join(f"<th>{_esc(str(c))}</th>" for c in classes)
        + "</tr>"
    )
    for c, row in zip(classes, counts):
        out.append(
            f"<tr><td>{_esc(str(c))}</td>"
            + "".join(f'<td class="num">{int(v)}</td>' for v in row)
            + "</tr>"
        )
    out.append("</table>")
    return "\n".join(out)


def _provenance_html(summary: dict) -> str:
    ds = summary["dataset"]
    rows = [
        ("config hash", summary["config"]),
        ("run key", summary["run_key"]),
        ("seed", summary["seed"]),
        ("dataset", f"{ds['name']} ({ds['bytes']} bytes)"),
        ("dataset sha256", ds["sha256"]),
        ("target", summary["target"]),
        ("test fraction", summary["test_fraction"]),
        ("oversampling", f"on (k={summary['smote_k']})" if summary["smote"] else "off"),
        ("scaling", "on" if summary["scale"] else "off"),
        ("correlation threshold", summary["correlation_threshold"]),
        ("models", ", ".join(summary["models"])),
    ]
    out = ['<table class="prov">']
    for key, value in rows:
        out.append(f"<tr><td>{_esc(str(key))}</td><td>{_esc(str(value))}</td></tr>")
    out.append("</table>")
    return "\n".join(out)


def emit_report(ws: Workspace, stable: bool = False, figures: bool = True) -> dict:
    """Render report/index.html; returns the written file names by stage.

    Raises MissingResults when the results stage lacks the run summary or
    the comparison table.
    """
    if figures:
        # deferred so that report emission without figures never needs matplotlib
        from ..figures import (
            save_class_distribution_png,
            save_comparison_png,
            save_heatmap_png,
            save_histogram_png,
        )
    results = ws.stage_dir("results")
    summary = _read_json(_require(results / "summary.json", "run summary"))
    comparison = _read_comparison(_require(results / "comparison.csv", "comparison table"))
    eda_on = bool(summary.get("eda", True))
    features = summary["features"]["requested"]

    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        '<head><meta charset="utf-8"><title>Flow classification report</title>',
        f"<style>\n{_CSS}</style></head>",
        "<body>",
        "<h1>Flow classification report</h1>",
        "<h2>Run provenance</h2>",
        _provenance_html(summary),
    ]
    figure_files = []

    if eda_on:
        dist, class_names = _read_class_distribution(
            _require(results / "class_distribution.csv", "class distribution")
        )
        labels = [class_names[c] for c in dist]
        parts.append("<h2>Class balance</h2>")
        parts.append(bar_chart_svg(labels, [dist[c] for c in dist], title="Rows per class"))
        if figures:
            save_class_distribution_png(dist, results / "fig_class_distribution.png", class_names)
            figure_files.append("fig_class_distribution.png")

        parts.append("<h2>Feature histograms</h2>")
        for name in features:
            hist = _read_histogram(
                _require(results / f"hist_{name}.csv", f"histogram for {name}"), name
            )
            parts.append(histogram_svg(hist, title=name))
            if figures:
                save_histogram_png(hist, results / f"fig_hist_{name}.png", title=name)
                figure_files.append(f"fig_hist_{name}.png")

        selection = _read_json(_require(results / "selection.json", "feature selection"))
        corr = _read_correlation(
            _require(results / "correlation.csv", "correlation matrix"),
            selection.get("degenerate", []),
        )
        parts.append("<h2>Feature correlation</h2>")
        parts.append(heatmap_svg(corr, title="Pearson correlation"))
        if selection["dropped"]:
            drops = "; ".join(
                f"{name} (|r| = {abs(r):.4f} with {partner})"
                for name, partner, r in selection["dropped"]
            )
            parts.append(
                f'<p class="note">Dropped above threshold {selection["threshold"]}: {_esc(drops)}</p>'
            )
        else:
            parts.append(
                f'<p class="note">No feature pair reached the drop threshold {selection["threshold"]}.</p>'
            )
        if figures:
            save_heatmap_png(corr, results / "fig_correlation.png")
            figure_files.append("fig_correlation.png")
    else:
        parts.append("<h2>Exploratory charts</h2>")
        parts.append(
            '<p class="note">Exploratory analysis was disabled for this run; '
            "class-balance, histogram, and correlation sections are omitted.</p>"
        )

    parts.append("<h2>Model comparison</h2>")
    parts.append(_comparison_html(comparison))
    parts.append(
        bar_chart_svg(
            [row.model for row in comparison.rows],
            [row.accuracy for row in comparison.rows],
            title="Accuracy by model",
        )
    )
    if figures:
        save_comparison_png(comparison, results / "fig_comparison.png")
        figure_files.append("fig_comparison.png")

    parts.append("<h2>Per-model detail</h2>")
    for short in summary["models"]:
        doc = _read_json(_require(results / f"eval_{short}.json", f"evaluation for {short}"))
        parts.append(f"<h3>{_esc(doc['model'])}</h3>")
        parts.append(f'<p>Accuracy: <strong>{doc["accuracy"]:.6f}</strong></p>')
        parts.append(_confusion_html(doc))

    if summary.get("warnings"):
        parts.append("<h2>Warnings</h2><ul>")
        for w in summary["warnings"]:
            parts.append(f"<li>{_esc(str(w))}</li>")
        parts.append("</ul>")

    if not stable:
        now = datetime.now(timezone.utc).isoformat()
        parts.append(f"<footer>generated {_esc(now)}</footer>")
    parts.append("</body></html>")

    html_path = ws.stage_path("report", "index.html")
    with open(html_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
    return {"report": ["index.html"], "results": figure_files}
