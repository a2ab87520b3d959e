"""Minimal deterministic SVG line charts (no plotting dependency)."""

from __future__ import annotations

import math
from html import escape
from typing import Mapping, Sequence

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 150, 36, 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
DASHES = ("", "6,3", "2,2", "8,3,2,3")


class PlotError(ValueError):
    pass


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.6g}"


def emit_plot(
    table: Mapping[str, Sequence[float]],
    series: Sequence[str],
    x: str = "t",
    title: str = "",
    xlabel: str | None = None,
    ylabel: str = "",
    styles: Mapping[str, str] | None = None,
) -> str:
    """Render the chosen columns of ``table`` against column ``x`` as SVG text.

    ``styles`` may map a series to "dashed" or "markers".  Output is a pure
    function of the inputs.
    """
    if not series:
        raise PlotError("no series selected")
    available = list(table)
    for name in [x, *series]:
        if name not in table:
            raise PlotError(f"unknown column '{name}'; available columns: {', '.join(available)}")
    styles = styles or {}
    xs = np.asarray(table[x], dtype=float)
    ys = {name: np.asarray(table[name], dtype=float) for name in series}

    x_lo, x_hi = float(xs.min()), float(xs.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()])
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    pad = 0.05 * (y_hi - y_lo) if y_hi > y_lo else max(0.5 * abs(y_lo), 0.5)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        return MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>'
    )
    for tx in _nice_ticks(x_lo, x_hi):
        X = _fmt(px(tx))
        out.append(f'<line x1="{X}" y1="{MARGIN_T + plot_h}" x2="{X}" y2="{MARGIN_T + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle">{_label(tx)}</text>')
    for ty in _nice_ticks(y_lo, y_hi):
        Y = _fmt(py(ty))
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{Y}" x2="{MARGIN_L}" y2="{Y}" stroke="black"/>')
        out.append(f'<line x1="{MARGIN_L}" y1="{Y}" x2="{MARGIN_L + plot_w}" y2="{Y}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{_label(ty)}</text>')
    out.append(
        f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel or x)}</text>'
    )
    if ylabel:
        cy = MARGIN_T + plot_h / 2
        out.append(
            f'<text x="16" y="{cy:.2f}" text-anchor="middle" transform="rotate(-90 16 {cy:.2f})">{escape(ylabel)}</text>'
        )

    for k, name in enumerate(series):
        color = COLORS[k % len(COLORS)]
        values = ys[name]
        style = styles.get(name, "")
        dash = DASHES[(k // len(COLORS)) % len(DASHES)] or ("6,3" if style == "dashed" else "")
        ok = np.isfinite(values)
        points = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(xs[ok], values[ok]))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{points}"/>')
        if style == "markers":
            for a, b in zip(xs[ok], values[ok]):
                out.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="3" fill="{color}"/>')
        ly = MARGIN_T + 12 + 18 * k
        lx = MARGIN_L + plot_w + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"{dash_attr}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}" dominant-baseline="middle">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
