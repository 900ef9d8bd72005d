"""Exploratory analysis: histograms, class counts, Pearson correlation,
and correlation-threshold feature dropping.

All functions are pure; CSV export helpers live at the bottom.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import EmptyInput, FlowlabError, TooFewRows
from .flowdata import FeatureMatrix, LabelVector


@dataclass(frozen=True)
class Histogram:
    column: str
    bin_edges: tuple  # length b+1, ascending
    counts: tuple  # length b, nonnegative ints

    def __post_init__(self):
        if len(self.bin_edges) != len(self.counts) + 1:
            raise FlowlabError("bin_edges must be one longer than counts")
        if any(b >= a for a, b in zip(self.bin_edges[1:], self.bin_edges)):
            raise FlowlabError("bin_edges must be strictly ascending")


@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple
    r: np.ndarray
    degenerate: frozenset  # zero-variance column names; their r entries are 0


@dataclass(frozen=True)
class FeatureSelection:
    kept: tuple
    dropped: tuple  # of (name, partner name, r value)
    threshold: float


def histogram(values: Iterable[float], bins: int = 30, column: str = "") -> Histogram:
    """Equal-width histogram over [min, max].

    Bin index is floor((x - min) * bins / (max - min)), clamped so the right
    edge of the last bin is inclusive. Non-finite inputs are ignored; an
    all-equal input collapses to a single unit-width bin centered on the
    value.
    """
    if bins < 1:
        raise FlowlabError("bins must be >= 1")
    vals = [float(v) for v in values if math.isfinite(float(v))]
    if not vals:
        raise EmptyInput("histogram needs at least one finite value")
    mn, mx = min(vals), max(vals)
    if mn == mx:
        return Histogram(column=column, bin_edges=(mn - 0.5, mx + 0.5), counts=(len(vals),))
    edges = np.linspace(mn, mx, bins + 1)
    if np.any(np.diff(edges) <= 0):  # pathological tiny range: degrade gracefully
        return Histogram(column=column, bin_edges=(mn - 0.5, mx + 0.5), counts=(len(vals),))
    counts = [0] * bins
    scale = bins / (mx - mn)
    for v in vals:
        i = int((v - mn) * scale)
        if i >= bins:
            i = bins - 1
        counts[i] += 1
    return Histogram(column=column, bin_edges=tuple(float(e) for e in edges), counts=tuple(counts))


def class_distribution(y: Union[LabelVector, Iterable[int]]) -> dict:
    """Counts per observed class, ascending class order; absent classes omitted."""
    values = y.values if isinstance(y, LabelVector) else y
    counts = Counter(int(v) for v in values)
    return {c: counts[c] for c in sorted(counts)}


def pearson(X: Union[FeatureMatrix, np.ndarray]) -> CorrelationMatrix:
    """Pearson correlation with population (1/n) normalization.

    Zero-variance columns (all values identical) are flagged degenerate and
    every entry involving them, including the diagonal, is 0 rather than NaN
    so downstream selection stays total.
    """
    if isinstance(X, FeatureMatrix):
        names, values = X.names, X.values
    else:
        values = np.asarray(X, dtype=np.float64)
        names = tuple(f"x{i}" for i in range(values.shape[1]))
    n = values.shape[0]
    if n < 2:
        raise TooFewRows("correlation needs at least 2 rows")
    constant = np.array([bool(np.all(col == col[0])) for col in values.T])
    centered = values - values.mean(axis=0)
    cov = centered.T @ centered / n
    std = np.sqrt(np.diag(cov).clip(min=0.0))
    constant = constant | (std == 0.0)  # guard against underflow to zero variance
    safe = np.where(constant, 1.0, std)
    r = cov / np.outer(safe, safe)
    r = np.clip(r, -1.0, 1.0)
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    idx = np.arange(len(names))
    r[idx[~constant], idx[~constant]] = 1.0
    degenerate = frozenset(names[i] for i in range(len(names)) if constant[i])
    return CorrelationMatrix(names=tuple(names), r=r, degenerate=degenerate)


def drop_correlated(C: CorrelationMatrix, threshold: float = 0.9) -> FeatureSelection:
    """Drop the later column of every pair at or above the threshold.

    Pairs (i, j), i < j, are scanned in schema order; j is dropped when
    |r[i][j]| >= threshold and j is not already dropped, recording
    (j, i, r). Deterministic given C.
    """
    if not (0.0 < threshold <= 1.0):
        raise FlowlabError("threshold must be in (0, 1]")
    names = C.names
    dropped_ix = set()
    dropped = []
    d = len(names)
    for i in range(d):
        for j in range(i + 1, d):
            if j in dropped_ix:
                continue
            rij = float(C.r[i][j])
            if abs(rij) >= threshold:
                dropped_ix.add(j)
                dropped.append((names[j], names[i], rij))
    kept = tuple(names[i] for i in range(d) if i not in dropped_ix)
    return FeatureSelection(kept=kept, dropped=tuple(dropped), threshold=threshold)


def write_histogram_csv(hist: Histogram, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in zip(hist.bin_edges, hist.bin_edges[1:], hist.counts):
            writer.writerow([repr(float(lo)), repr(float(hi)), c])


def write_correlation_csv(C: CorrelationMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + list(C.names))
        for i, name in enumerate(C.names):
            writer.writerow([name] + [repr(float(v)) for v in C.r[i]])


def write_class_distribution_csv(dist: dict, path, class_names: dict = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "name", "count"])
        for c, count in dist.items():
            name = class_names.get(c, str(c)) if class_names else str(c)
            writer.writerow([c, name, count])
