"""Dependency-free SVG line plots with deterministic text output.

Every run of emit_plot on the same input yields the same bytes: coordinates
are rounded to fixed precision, colors come from a fixed cycle, and nothing
is timestamped. The output is standalone SVG 1.1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Series:
    label: str
    x: tuple
    y: tuple

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError(f"series {self.label!r}: x and y lengths differ")
        if len(self.x) == 0:
            raise ValueError(f"series {self.label!r} is empty")


@dataclass(frozen=True)
class PlotStyle:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    log_x: bool = False
    log_y: bool = False
    width: int = 640
    height: int = 420
    markers: bool = True


_COLORS = ("#1b6ca8", "#c43d3d", "#2e8b57", "#8a2be2", "#d2691e", "#2f4f4f", "#b8860b", "#4682b4")
_MARGIN = dict(left=62, right=16, top=30, bottom=46)


def _fmt(v: float) -> str:
    # Fixed two-decimal pixel coordinates keep the text deterministic.
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 0.5 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _decade_ticks(lo: float, hi: float) -> list[float]:
    ticks = []
    e = math.floor(math.log10(lo))
    while 10.0**e <= hi * (1.0 + 1e-12):
        if 10.0**e >= lo * (1.0 - 1e-12):
            ticks.append(10.0**e)
        e += 1
    return ticks or [lo, hi]


def _tick_label(v: float, log: bool) -> str:
    if log:
        e = round(math.log10(v))
        if abs(v - 10.0**e) < 1e-9 * v:
            return f"1e{e}"
    if v == int(v) and abs(v) < 1e7:
        return str(int(v))
    return f"{v:.3g}"


def emit_plot(series: list[Series], style: PlotStyle = PlotStyle()) -> str:
    """Render labeled series as a standalone SVG 1.1 document string."""
    if not series:
        raise ValueError("emit_plot needs at least one series")
    for s in series:
        if style.log_x and any(v <= 0 for v in s.x):
            raise ValueError(f"series {s.label!r}: log-scale x needs positive values")
        if style.log_y and any(v <= 0 for v in s.y):
            raise ValueError(f"series {s.label!r}: log-scale y needs positive values")

    def tx(v):
        return math.log10(v) if style.log_x else v

    def ty(v):
        return math.log10(v) if style.log_y else v

    xs = [tx(v) for s in series for v in s.x]
    ys = [ty(v) for s in series for v in s.y]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    xpad = 0.04 * (xhi - xlo)
    ypad = 0.06 * (yhi - ylo)
    xlo, xhi = xlo - xpad, xhi + xpad
    ylo, yhi = ylo - ypad, yhi + ypad

    w, h = style.width, style.height
    px0, px1 = _MARGIN["left"], w - _MARGIN["right"]
    py0, py1 = h - _MARGIN["bottom"], _MARGIN["top"]

    def sx(v):
        return px0 + (tx(v) - xlo) / (xhi - xlo) * (px1 - px0)

    def sy(v):
        return py0 + (ty(v) - ylo) / (yhi - ylo) * (py1 - py0)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
    )
    out.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>')
    out.append(
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )

    if style.log_x:
        xticks = _decade_ticks(10.0**xlo, 10.0**xhi)
    else:
        xticks = _nice_ticks(xlo, xhi)
    if style.log_y:
        yticks = _decade_ticks(10.0**ylo, 10.0**yhi)
    else:
        yticks = _nice_ticks(ylo, yhi)

    for t in xticks:
        x = sx(t)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{py0}" x2="{_fmt(x)}" y2="{py0 + 5}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{py0 + 18}" font-size="11" text-anchor="middle" '
            f'font-family="sans-serif">{_tick_label(t, style.log_x)}</text>'
        )
    for t in yticks:
        y = sy(t)
        out.append(
            f'<line x1="{px0 - 5}" y1="{_fmt(y)}" x2="{px0}" y2="{_fmt(y)}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px0 - 8}" y="{_fmt(y + 4)}" font-size="11" text-anchor="end" '
            f'font-family="sans-serif">{_tick_label(t, style.log_y)}</text>'
        )

    if style.title:
        out.append(
            f'<text x="{(px0 + px1) // 2}" y="19" font-size="13" text-anchor="middle" '
            f'font-family="sans-serif">{style.title}</text>'
        )
    if style.xlabel:
        out.append(
            f'<text x="{(px0 + px1) // 2}" y="{h - 10}" font-size="12" text-anchor="middle" '
            f'font-family="sans-serif">{style.xlabel}</text>'
        )
    if style.ylabel:
        out.append(
            f'<text x="14" y="{(py0 + py1) // 2}" font-size="12" text-anchor="middle" '
            f'font-family="sans-serif" transform="rotate(-90 14 {(py0 + py1) // 2})">'
            f"{style.ylabel}</text>"
        )

    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = [(sx(x), sy(y)) for x, y in zip(s.x, s.y)]
        if len(pts) > 1:
            coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
            out.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.6"/>'
            )
        if style.markers or len(pts) == 1:
            for x, y in pts:
                out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>')

    # Legend in the top-right corner of the plot area, one row per series.
    lx, ly = px1 - 150, py1 + 10
    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        y = ly + 16 * i
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" '
            f'stroke="{color}" stroke-width="1.6" class="legend-swatch"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{y + 4}" font-size="11" font-family="sans-serif" '
            f'class="legend-label">{s.label}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
