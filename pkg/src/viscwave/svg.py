"""Minimal deterministic SVG line plots.

No external plotting dependency: byte-identical output for identical input,
which keeps run artifacts reproducible and checksummable.
"""

from __future__ import annotations

import math

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
WIDTH, HEIGHT = 640.0, 480.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70.0, 20.0, 40.0, 50.0


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _transform(v: float, log: bool) -> float:
    return math.log10(v) if log else v


def line_plot(series, *, title: str = "", xlabel: str = "", ylabel: str = "",
              logx: bool = False, logy: bool = False, annotations=()) -> str | None:
    """Render labelled (xs, ys) series to an SVG string.

    Points with non-finite values (or non-positive ones on a log axis) are
    dropped; returns None when nothing is left to draw.
    """
    cleaned = []
    for label, xs, ys in series:
        pts = []
        for x, y in zip(xs, ys):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if (logx and x <= 0.0) or (logy and y <= 0.0):
                continue
            pts.append((_transform(float(x), logx), _transform(float(y), logy)))
        if pts:
            cleaned.append((label, pts))
    if not cleaned:
        return None

    all_x = [p[0] for _, pts in cleaned for p in pts]
    all_y = [p[1] for _, pts in cleaned for p in pts]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(WIDTH)}" '
        f'height="{int(HEIGHT)}" viewBox="0 0 {int(WIDTH)} {int(HEIGHT)}">',
        f'<rect width="{int(WIDTH)}" height="{int(HEIGHT)}" fill="white"/>',
        f'<rect x="{_fmt(MARGIN_L)}" y="{_fmt(MARGIN_T)}" width="{_fmt(plot_w)}" '
        f'height="{_fmt(plot_h)}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{_fmt(WIDTH / 2)}" y="24" text-anchor="middle" '
                   f'font-family="monospace" font-size="14">{title}</text>')

    n_ticks = 5
    for i in range(n_ticks):
        xv = x_lo + (x_hi - x_lo) * i / (n_ticks - 1)
        xp = px(xv)
        label = _fmt(10**xv) if logx else _fmt(xv)
        out.append(f'<line x1="{_fmt(xp)}" y1="{_fmt(MARGIN_T + plot_h)}" '
                   f'x2="{_fmt(xp)}" y2="{_fmt(MARGIN_T + plot_h + 5)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(xp)}" y="{_fmt(MARGIN_T + plot_h + 18)}" '
                   f'text-anchor="middle" font-family="monospace" font-size="10">{label}</text>')
        yv = y_lo + (y_hi - y_lo) * i / (n_ticks - 1)
        yp = py(yv)
        label = _fmt(10**yv) if logy else _fmt(yv)
        out.append(f'<line x1="{_fmt(MARGIN_L - 5)}" y1="{_fmt(yp)}" '
                   f'x2="{_fmt(MARGIN_L)}" y2="{_fmt(yp)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(MARGIN_L - 8)}" y="{_fmt(yp + 3)}" '
                   f'text-anchor="end" font-family="monospace" font-size="10">{label}</text>')
    if xlabel:
        out.append(f'<text x="{_fmt(MARGIN_L + plot_w / 2)}" y="{_fmt(HEIGHT - 12)}" '
                   f'text-anchor="middle" font-family="monospace" font-size="12">{xlabel}</text>')
    if ylabel:
        yc = MARGIN_T + plot_h / 2
        out.append(f'<text x="16" y="{_fmt(yc)}" text-anchor="middle" '
                   f'font-family="monospace" font-size="12" '
                   f'transform="rotate(-90 16 {_fmt(yc)})">{ylabel}</text>')

    for idx, (label, pts) in enumerate(cleaned):
        color = PALETTE[idx % len(PALETTE)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        ly = MARGIN_T + 14 + 14 * idx
        lx = MARGIN_L + plot_w - 150
        out.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 4)}" x2="{_fmt(lx + 18)}" '
                   f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{_fmt(lx + 24)}" y="{_fmt(ly)}" '
                   f'font-family="monospace" font-size="11">{label}</text>')

    for idx, note in enumerate(annotations):
        out.append(f'<text x="{_fmt(MARGIN_L + 8)}" '
                   f'y="{_fmt(MARGIN_T + plot_h - 8 - 14 * idx)}" '
                   f'font-family="monospace" font-size="11">{note}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
