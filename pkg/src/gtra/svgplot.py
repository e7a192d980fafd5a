"""Minimal deterministic SVG line plots (no plotting dependency).

Each series is rendered as a polyline plus point markers; the raw data is
also embedded verbatim in ``data-points`` attributes (17 significant digits)
so downstream checks can compare plots against their CSV companions exactly.
Non-finite points are dropped from the drawing.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 150, 36, 48
PALETTE = ("#1f6fb4", "#d1562f", "#3a8f3f", "#8452a8", "#8c6d31", "#2b8c8c")


def _fmt_data(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_px(x: float) -> str:
    return format(float(x), ".2f")


def _axis_range(values: list[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return (0.0, 1.0)
    lo, hi = min(finite), max(finite)
    if lo == hi:
        pad = abs(lo) * 0.05 + 1.0
    else:
        pad = (hi - lo) * 0.05
    return (lo - pad, hi + pad)


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def line_plot(
    path,
    series: list[tuple[str, list[float], list[float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> None:
    """Write an SVG with one (label, xs, ys) polyline per series."""
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = _axis_range(all_x)
    y_lo, y_hi = _axis_range(all_y)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333" stroke-width="1"/>',
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="20" text-anchor="middle" '
        f'font-size="14">{escape(title)}</text>',
    ]
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(
            f'<line x1="{_fmt_px(px)}" y1="{MARGIN_T + plot_h}" x2="{_fmt_px(px)}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{_fmt_px(px)}" y="{MARGIN_T + plot_h + 18}" '
            f'text-anchor="middle">{format(tick, ".4g")}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt_px(py)}" x2="{MARGIN_L}" '
            f'y2="{_fmt_px(py)}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt_px(py + 4)}" '
            f'text-anchor="end">{format(tick, ".4g")}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 10}" '
        f'text-anchor="middle">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )

    parts.append(
        f'<g class="data" data-xmin={quoteattr(_fmt_data(x_lo))} '
        f"data-xmax={quoteattr(_fmt_data(x_hi))} "
        f"data-ymin={quoteattr(_fmt_data(y_lo))} "
        f"data-ymax={quoteattr(_fmt_data(y_hi))}>"
    )
    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pairs = list(zip(xs, ys))
        drawable = [(x, y) for x, y in pairs if math.isfinite(x) and math.isfinite(y)]
        encoded = " ".join(f"{_fmt_data(x)},{_fmt_data(y)}" for x, y in pairs)
        px_points = " ".join(f"{_fmt_px(sx(x))},{_fmt_px(sy(y))}" for x, y in drawable)
        parts.append(
            f'<polyline class="series" data-label={quoteattr(label)} '
            f"data-points={quoteattr(encoded)} "
            f'fill="none" stroke="{color}" stroke-width="1.5" points="{px_points}"/>'
        )
        for x, y in drawable:
            parts.append(
                f'<circle cx="{_fmt_px(sx(x))}" cy="{_fmt_px(sy(y))}" r="2.5" '
                f'fill="{color}"/>'
            )
        ly = MARGIN_T + 14 + 16 * k
        lx = MARGIN_L + plot_w + 10
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(f'<text x="{lx + 24}" y="{ly}">{escape(label)}</text>')
    parts.append("</g>")
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def marked_scatter_plot(
    path,
    trajectories: list[tuple[str, list[float], list[float]]],
    marker: tuple[float, float] | None,
    title: str,
    x_label: str,
    y_label: str,
) -> None:
    """Phase-portrait variant: unit-square axes and an optional marked point."""
    series = list(trajectories)
    if marker is not None:
        series = series + [("equilibrium", [marker[0]], [marker[1]])]
    line_plot(path, series, title, x_label, y_label)
