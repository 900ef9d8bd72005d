"""Matplotlib PNG figure export.

Complements the SVG backend: the report and eda paths drop PNG figures next
to their CSV outputs. Metadata is pinned so repeated runs produce identical
bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .eda import CorrelationMatrix, Histogram  # noqa: E402
from .metrics import ComparisonTable  # noqa: E402

_META = {"Software": "flowlab"}
_DPI = 100


def save_histogram_png(hist: Histogram, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    lefts = hist.bin_edges[:-1]
    widths = [hi - lo for lo, hi in zip(hist.bin_edges, hist.bin_edges[1:])]
    ax.bar(lefts, hist.counts, width=widths, align="edge", color="#4878a8", edgecolor="white")
    ax.set_title(title or hist.column)
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, metadata=_META)
    plt.close(fig)


def save_class_distribution_png(dist: dict, path, class_names: dict = None, title: str = "Class distribution") -> None:
    labels = [class_names.get(c, str(c)) if class_names else str(c) for c in dist]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar(range(len(dist)), list(dist.values()), color="#4878a8")
    ax.set_xticks(range(len(dist)))
    ax.set_xticklabels(labels)
    ax.set_title(title)
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, metadata=_META)
    plt.close(fig)


def save_heatmap_png(C: CorrelationMatrix, path, title: str = "Correlation") -> None:
    fig, ax = plt.subplots(figsize=(5.6, 4.8))
    im = ax.imshow(C.r, vmin=-1.0, vmax=1.0, cmap="coolwarm")
    ax.set_xticks(range(len(C.names)))
    ax.set_yticks(range(len(C.names)))
    ax.set_xticklabels(C.names, rotation=30, ha="right")
    ax.set_yticklabels(C.names)
    for i in range(len(C.names)):
        for j in range(len(C.names)):
            ax.text(j, i, f"{C.r[i][j]:.2f}", ha="center", va="center", fontsize=9)
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, metadata=_META)
    plt.close(fig)


def save_comparison_png(table: ComparisonTable, path, title: str = "Model comparison") -> None:
    models = [row.model for row in table.rows]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar(range(len(models)), [row.accuracy for row in table.rows], color="#4878a8")
    ax.set_xticks(range(len(models)))
    ax.set_xticklabels(models)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title(title)
    for i, row in enumerate(table.rows):
        ax.text(i, row.accuracy + 0.01, f"{row.accuracy:.3f}", ha="center", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, metadata=_META)
    plt.close(fig)
