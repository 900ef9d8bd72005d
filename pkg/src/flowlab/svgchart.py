"""Hand-rolled SVG charts.

These renderers are the deterministic chart backend: pure string assembly,
fixed float formatting, no wall-clock or environment input, so identical
data yields byte-identical SVG. Used both for standalone chart files and
for inline embedding in the pipeline report.
"""

from __future__ import annotations

from typing import Sequence

from .eda import CorrelationMatrix, Histogram


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def bar_chart_svg(labels: Sequence[str], values: Sequence[float], title: str = "", width: int = 560, height: int = 320) -> str:
    n = max(len(values), 1)
    top = max(list(values) + [1.0])
    margin_l, margin_r, margin_t, margin_b = 50.0, 15.0, 34.0, 46.0
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    slot = plot_w / n
    bar_w = slot * 0.72
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" role="img">',
        f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{_esc(title)}</text>',
        f'<line x1="{_fmt(margin_l)}" y1="{_fmt(height - margin_b)}" x2="{_fmt(width - margin_r)}" '
        f'y2="{_fmt(height - margin_b)}" stroke="#444" stroke-width="1"/>',
    ]
    for i, (label, value) in enumerate(zip(labels, values)):
        h = plot_h * (float(value) / top) if top else 0.0
        x = margin_l + i * slot + (slot - bar_w) / 2
        y = margin_t + plot_h - h
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(bar_w)}" height="{_fmt(h)}" fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + bar_w / 2)}" y="{_fmt(y - 4)}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_esc(f"{float(value):g}")}</text>'
        )
        parts.append(
            f'<text x="{_fmt(x + bar_w / 2)}" y="{_fmt(height - margin_b + 16)}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{_esc(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_svg(hist: Histogram, title: str = "") -> str:
    """Bar chart over the bin grid with sparse edge tick labels."""
    edges = hist.bin_edges
    counts = hist.counts
    width, height = 560, 320
    margin_l, margin_r, margin_t, margin_b = 50.0, 15.0, 34.0, 46.0
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    top = max(max(counts), 1)
    n = len(counts)
    slot = plot_w / n
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" role="img">',
        f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{_esc(title or hist.column)}</text>',
        f'<line x1="{_fmt(margin_l)}" y1="{_fmt(height - margin_b)}" x2="{_fmt(width - margin_r)}" '
        f'y2="{_fmt(height - margin_b)}" stroke="#444" stroke-width="1"/>',
    ]
    for i, count in enumerate(counts):
        h = plot_h * (count / top)
        x = margin_l + i * slot
        y = margin_t + plot_h - h
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(slot)}" height="{_fmt(h)}" '
            f'fill="#4878a8" stroke="#ffffff" stroke-width="0.5"/>'
        )
    # tick labels on at most ~6 edges to stay readable at any bin count
    step = max(1, n // 5)
    ticks = sorted(set(list(range(0, n + 1, step)) + [n]))
    for t in ticks:
        x = margin_l + t * slot
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(height - margin_b + 16)}" text-anchor="middle" font-size="10" '
            f'font-family="sans-serif">{_esc(f"{edges[t]:g}")}</text>'
        )
    parts.append(
        f'<text x="12" y="{_fmt(margin_t)}" font-size="11" font-family="sans-serif">{top}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heat_color(v: float) -> str:
    # blue at -1, white at 0, red at +1
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        level = int(round(255 * (1 - v)))
        return f"#ff{level:02x}{level:02x}"
    level = int(round(255 * (1 + v)))
    return f"#{level:02x}{level:02x}ff"


def heatmap_svg(C: CorrelationMatrix, title: str = "Correlation") -> str:
    """Color-mapped correlation grid with per-cell value annotations."""
    names = C.names
    d = len(names)
    cell = 64
    margin_l, margin_t = 110.0, 60.0
    width = int(margin_l + d * cell + 20)
    height = int(margin_t + d * cell + 30)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" role="img">',
        f'<text x="{_fmt(width / 2)}" y="22" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{_esc(title)}</text>',
    ]
    for j, name in enumerate(names):
        x = margin_l + j * cell + cell / 2
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(margin_t - 8)}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_esc(name)}</text>'
        )
    for i, name in enumerate(names):
        y = margin_t + i * cell + cell / 2
        parts.append(
            f'<text x="{_fmt(margin_l - 8)}" y="{_fmt(y + 4)}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{_esc(name)}</text>'
        )
        for j in range(d):
            v = float(C.r[i][j])
            degenerate = names[i] in C.degenerate or names[j] in C.degenerate
            fill = "#dddddd" if degenerate else _heat_color(v)
            x = margin_l + j * cell
            ytop = margin_t + i * cell
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(ytop)}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1"/>'
            )
            text_fill = "#ffffff" if (abs(v) > 0.6 and not degenerate) else "#222222"
            parts.append(
                f'<text x="{_fmt(x + cell / 2)}" y="{_fmt(ytop + cell / 2 + 4)}" text-anchor="middle" '
                f'font-size="12" font-family="sans-serif" fill="{text_fill}">{_fmt(v)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
