"""Standalone SVG line plots with no plotting dependency.

Output is a pure function of the table and style, so identical input gives
identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

from .errors import ValidationError
from .table import Table

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 420
    title: Optional[str] = None
    x_label: str = "t"
    y_label: str = ""
    columns: Optional[Sequence[str]] = None
    stroke_width: float = 1.6


def nice_ticks(lo: float, hi: float, target: int = 6) -> List[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(1, target - 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    x = first
    while x <= hi + step * 1e-9:
        ticks.append(round(x, 12))
        x += step
    return ticks


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _label(x: float) -> str:
    return f"{x:g}"


def emit_svg(table: Table, style: PlotStyle = PlotStyle()) -> str:
    if not table.rows:
        raise ValidationError("cannot plot an empty table")
    if "t" not in table.columns:
        raise ValidationError(f"table needs a 't' column, has {table.columns}")
    series = list(style.columns) if style.columns else [c for c in table.columns if c != "t"]
    series = [c for c in series if c != "t"]
    if not series:
        raise ValidationError("table has no series column besides 't'")
    for c in series:
        if c not in table.columns:
            raise ValidationError(f"no column named {c!r}")

    ts = [float(x) for x in table.column("t")]
    ys = {}
    for c in series:
        col = table.column(c)
        if any(isinstance(v, str) for v in col):
            raise ValidationError(f"column {c!r} is not numeric")
        ys[c] = [float(v) for v in col]

    finite = [v for c in series for v in ys[c] if math.isfinite(v)]
    if not finite:
        raise ValidationError("no finite values to plot")
    xt = nice_ticks(min(ts), max(ts))
    yt = nice_ticks(min(finite), max(finite))
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]

    W, H = style.width, style.height
    left, right, top, bottom = 64, 170, 36 if style.title else 16, 48
    pw, ph = W - left - right, H - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
    ]
    if style.title:
        out.append(f'<text x="{_fmt(left + pw / 2)}" y="22" text-anchor="middle" '
                   f'font-size="14">{escape(style.title)}</text>')

    out.append('<g class="axes" stroke="#000" stroke-width="1">')
    out.append(f'<line x1="{left}" y1="{_fmt(top + ph)}" x2="{_fmt(left + pw)}" y2="{_fmt(top + ph)}"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{_fmt(top + ph)}"/>')
    out.append("</g>")

    out.append('<g class="grid" stroke="#ddd" stroke-width="0.5">')
    for x in xt:
        out.append(f'<line x1="{_fmt(sx(x))}" y1="{top}" x2="{_fmt(sx(x))}" y2="{_fmt(top + ph)}"/>')
    for y in yt:
        out.append(f'<line x1="{left}" y1="{_fmt(sy(y))}" x2="{_fmt(left + pw)}" y2="{_fmt(sy(y))}"/>')
    out.append("</g>")

    out.append('<g class="ticks">')
    for x in xt:
        out.append(f'<text x="{_fmt(sx(x))}" y="{_fmt(top + ph + 16)}" text-anchor="middle">{_label(x)}</text>')
    for y in yt:
        out.append(f'<text x="{left - 6}" y="{_fmt(sy(y) + 4)}" text-anchor="end">{_label(y)}</text>')
    out.append(f'<text x="{_fmt(left + pw / 2)}" y="{H - 10}" text-anchor="middle">{escape(style.x_label)}</text>')
    if style.y_label:
        out.append(f'<text x="16" y="{_fmt(top + ph / 2)}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {_fmt(top + ph / 2)})">{escape(style.y_label)}</text>')
    out.append("</g>")

    for i, c in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(ts, ys[c]) if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="{style.stroke_width}" '
                   f'points="{pts}"><title>{escape(c)}</title></polyline>')

    out.append('<g class="legend">')
    lx = left + pw + 14
    for i, c in enumerate(series):
        ly = top + 10 + 18 * i
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(c)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
