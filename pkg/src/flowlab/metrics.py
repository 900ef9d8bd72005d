"""Confusion matrices, accuracy/precision/recall/F1 scoring, and model
comparison tables.

Scoring conventions: any 0/0 metric cell is defined as 0 and flagged in
EvaluationReport.zero_division rather than returned as NaN. The single
precision/recall/f1 summary per model in comparison tables is the
support-weighted average; per-class and macro values are also carried so
the choice is auditable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyMatrix, FlowlabError, LengthMismatch, UnknownLabel


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple  # sorted class codes
    counts: np.ndarray  # rows = true class, columns = predicted class

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", c)
        k = len(self.classes)
        if c.shape != (k, k):
            raise FlowlabError("counts must be K x K")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvaluationReport:
    model: str
    accuracy: float
    per_class: dict  # class code -> ClassScores
    macro: Averages
    weighted: Averages
    confusion: ConfusionMatrix
    zero_division: tuple = ()  # (class code, metric name) cells defined to 0


def confusion(y_true: Sequence[int], y_pred: Sequence[int], classes: Optional[Sequence[int]] = None) -> ConfusionMatrix:
    """counts[i][j] = number of rows with true class i and predicted class j."""
    t = np.asarray(list(y_true), dtype=np.int64)
    p = np.asarray(list(y_pred), dtype=np.int64)
    if len(t) != len(p):
        raise LengthMismatch(f"y_true has {len(t)} rows, y_pred has {len(p)}")
    if classes is None:
        classes = sorted(set(t.tolist()) | set(p.tolist()))
    classes = tuple(int(c) for c in classes)
    index = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    counts = np.zeros((k, k), dtype=np.int64)
    for ti, pi in zip(t.tolist(), p.tolist()):
        if ti not in index:
            raise UnknownLabel(f"true label {ti} not in classes {classes}")
        if pi not in index:
            raise UnknownLabel(f"predicted label {pi} not in classes {classes}")
        counts[index[ti], index[pi]] += 1
    return ConfusionMatrix(classes=classes, counts=counts)


def score(cm: ConfusionMatrix, model: str = "") -> EvaluationReport:
    """Per-class precision/recall/F1 plus accuracy, macro, and weighted averages."""
    total = cm.total
    if total == 0:
        raise EmptyMatrix("cannot score an empty confusion matrix")
    counts = cm.counts
    tp = np.diag(counts).astype(np.float64)
    support = counts.sum(axis=1).astype(np.float64)
    predicted = counts.sum(axis=0).astype(np.float64)

    per_class = {}
    zero_division = []
    precisions, recalls, f1s = [], [], []
    for i, c in enumerate(cm.classes):
        if predicted[i] == 0:
            precision = 0.0
            zero_division.append((c, "precision"))
        else:
            precision = float(tp[i] / predicted[i])
        if support[i] == 0:
            recall = 0.0
            zero_division.append((c, "recall"))
        else:
            recall = float(tp[i] / support[i])
        if precision + recall == 0.0:
            f1 = 0.0
            zero_division.append((c, "f1"))
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        per_class[c] = ClassScores(precision=precision, recall=recall, f1=f1, support=int(support[i]))
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)

    k = len(cm.classes)
    macro = Averages(
        precision=float(sum(precisions) / k),
        recall=float(sum(recalls) / k),
        f1=float(sum(f1s) / k),
    )
    weighted = Averages(
        precision=float(np.dot(support, precisions) / total),
        recall=float(np.dot(support, recalls) / total),
        f1=float(np.dot(support, f1s) / total),
    )
    return EvaluationReport(
        model=model,
        accuracy=float(tp.sum() / total),
        per_class=per_class,
        macro=macro,
        weighted=weighted,
        confusion=cm,
        zero_division=tuple(zero_division),
    )


@dataclass(frozen=True)
class ComparisonRow:
    model: str
    accuracy: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple


def compare(reports: Sequence[EvaluationReport]) -> ComparisonTable:
    """Sort the weighted summaries by accuracy descending, ties by name."""
    if not reports:
        raise FlowlabError("compare needs at least one report")
    rows = [
        ComparisonRow(
            model=r.model,
            accuracy=r.accuracy,
            precision=r.weighted.precision,
            recall=r.weighted.recall,
            f1=r.weighted.f1,
        )
        for r in reports
    ]
    rows.sort(key=lambda row: (-row.accuracy, row.model))
    return ComparisonTable(rows=tuple(rows))


_COMPARE_HEADER = ("Model", "Accuracy", "Precision", "Recall", "F1-score")


def render_comparison_text(table: ComparisonTable) -> str:
    cells = [list(_COMPARE_HEADER)]
    for row in table.rows:
        cells.append([
            row.model,
            f"{row.accuracy:.12f}",
            f"{row.precision:.4f}",
            f"{row.recall:.4f}",
            f"{row.f1:.4f}",
        ])
    widths = [max(len(r[i]) for r in cells) for i in range(len(_COMPARE_HEADER))]
    lines = []
    for j, row in enumerate(cells):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_comparison_csv(table: ComparisonTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([h.lower().replace("-", "_") for h in _COMPARE_HEADER])
        for row in table.rows:
            writer.writerow([
                row.model,
                repr(row.accuracy),
                repr(row.precision),
                repr(row.recall),
                repr(row.f1),
            ])


def report_to_dict(report: EvaluationReport) -> dict:
    """JSON-friendly view of an EvaluationReport."""
    return {
        "model": report.model,
        "accuracy": report.accuracy,
        "per_class": {
            str(c): {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "support": s.support,
            }
            for c, s in report.per_class.items()
        },
        "macro": {"precision": report.macro.precision, "recall": report.macro.recall, "f1": report.macro.f1},
        "weighted": {
            "precision": report.weighted.precision,
            "recall": report.weighted.recall,
            "f1": report.weighted.f1,
        },
        "confusion": {
            "classes": list(report.confusion.classes),
            "counts": report.confusion.counts.tolist(),
        },
        "zero_division": [[c, m] for c, m in report.zero_division],
    }


def report_from_dict(doc: dict) -> EvaluationReport:
    per_class = {
        int(c): ClassScores(
            precision=float(s["precision"]),
            recall=float(s["recall"]),
            f1=float(s["f1"]),
            support=int(s["support"]),
        )
        for c, s in doc["per_class"].items()
    }
    cm = ConfusionMatrix(
        classes=tuple(int(c) for c in doc["confusion"]["classes"]),
        counts=np.asarray(doc["confusion"]["counts"], dtype=np.int64),
    )
    return EvaluationReport(
        model=str(doc["model"]),
        accuracy=float(doc["accuracy"]),
        per_class=per_class,
        macro=Averages(**{k: float(v) for k, v in doc["macro"].items()}),
        weighted=Averages(**{k: float(v) for k, v in doc["weighted"].items()}),
        confusion=cm,
        zero_division=tuple((int(c), str(m)) for c, m in doc.get("zero_division", [])),
    )


def save_report(report: EvaluationReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report(path) -> EvaluationReport:
    with open(path, encoding="utf-8") as fh:
        return report_from_dict(json.load(fh))


def render_report_text(report: EvaluationReport) -> str:
    """Aligned plain-text view: headline, per-class table, confusion matrix."""
    lines = [
        f"model: {report.model}",
        f"accuracy: {report.accuracy:.12f}",
        "",
        "class  precision  recall  f1      support",
    ]
    for c in report.confusion.classes:
        s = report.per_class[c]
        lines.append(f"{c:<5}  {s.precision:<9.4f}  {s.recall:<6.4f}  {s.f1:<6.4f}  {s.support}")
    lines.append("")
    lines.append(
        f"macro     p={report.macro.precision:.4f} r={report.macro.recall:.4f} f1={report.macro.f1:.4f}"
    )
    lines.append(
        f"weighted  p={report.weighted.precision:.4f} r={report.weighted.recall:.4f} f1={report.weighted.f1:.4f}"
    )
    lines.append("")
    lines.append("confusion (rows = true, columns = predicted):")
    header = "      " + " ".join(f"{c:>8}" for c in report.confusion.classes)
    lines.append(header)
    for i, c in enumerate(report.confusion.classes):
        row = " ".join(f"{int(v):>8}" for v in report.confusion.counts[i])
        lines.append(f"{c:>5} {row}")
    if report.zero_division:
        cells = ", ".join(f"class {c} {m}" for c, m in report.zero_division)
        lines.append("")
        lines.append(f"note: 0/0 defined as 0 for: {cells}")
    return "\n".join(lines) + "\n"
