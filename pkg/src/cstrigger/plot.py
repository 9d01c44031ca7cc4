"""Deterministic SVG multi-test plots.

X is the window distance, Y the relative switching propensity.  One line per
(direction, mode): colour encodes the direction, solid lines are "precede"
tests and dashed lines "neighbor" tests.  Non-significant tests get a black
diamond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape

from .association import BOTH, L1_TO_L2, L2_TO_L1, NEIGHBOR, PRECEDE
from .grid import GridResult

__all__ = ["PlotStyle", "render_multitest_svg"]

WIDTH, HEIGHT = 760, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 200, 50, 60


@dataclass(frozen=True)
class PlotStyle:
    colors: dict = field(default_factory=lambda: {
        L1_TO_L2: "#e6b400",  # yellow
        L2_TO_L1: "#d62728",  # red
        BOTH: "#2ca02c",      # green
    })
    dashes: dict = field(default_factory=lambda: {PRECEDE: "", NEIGHBOR: "7,5"})
    diamond_size: float = 6.0
    log_y: bool = False
    alpha: Optional[float] = None  # falls back to the grid's alpha


def _n(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _nice_step(span: float, target: int = 6) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _direction_label(direction: str, l1: str, l2: str) -> str:
    a, b = l1.upper(), l2.upper()
    return {L1_TO_L2: f"{a}→{b}", L2_TO_L1: f"{b}→{a}", BOTH: "both"}[direction]


def render_multitest_svg(grid: GridResult, style: Optional[PlotStyle] = None) -> str:
    style = style or PlotStyle()
    alpha = grid.alpha if style.alpha is None else style.alpha
    spec = grid.spec
    distances = list(spec.distances)
    values = [r.rsp for r in grid.results.values() if r.rsp is not None]
    if style.log_y:
        values = [v for v in values if v > 0]

    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM
    dmin, dmax = min(distances), max(distances)

    def sx(d: float) -> float:
        if dmax == dmin:
            return LEFT + pw / 2
        return LEFT + (d - dmin) / (dmax - dmin) * pw

    if style.log_y and values:
        lo = math.floor(math.log10(min(values)) * 4) / 4
        hi = math.ceil(math.log10(max(values)) * 4) / 4
        if hi <= lo:
            lo, hi = lo - 0.25, hi + 0.25
        exps = range(math.floor(lo), math.ceil(hi) + 1)
        ticks = [10.0 ** e * m for e in exps for m in (1, 2, 5) if lo <= math.log10(10.0 ** e * m) <= hi]
        tf = math.log10
    else:
        top = max(values + [1.0]) if values else 1.0
        step = _nice_step(top)
        hi = math.ceil(top / step) * step
        if hi <= top:
            hi += step
        lo = 0.0
        ticks = [i * step for i in range(int(round(hi / step)) + 1)]

        def tf(v):
            return v

    def sy(v: float) -> float:
        return TOP + ph - (tf(v) - lo) / (hi - lo) * ph

    title = f"{grid.corpus_label or 'corpus'}: {spec.shared_type}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<title>{escape(title)}</title>',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{_n(LEFT + pw / 2)}" y="{TOP - 20}" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]

    # axes and ticks
    out.append('<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}"/>')
    out.append("</g>")
    out.append('<g class="ticks">')
    for d in distances:
        x = _n(sx(d))
        out.append(f'<line x1="{x}" y1="{TOP + ph}" x2="{x}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{TOP + ph + 19}" text-anchor="middle">{d}</text>')
    if values:
        for t in ticks:
            y = _n(sy(t))
            out.append(f'<line x1="{LEFT - 5}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>')
            out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="#e5e5e5"/>')
            out.append(f'<text x="{LEFT - 8}" y="{_n(sy(t) + 4)}" text-anchor="end">{t:g}</text>')
    out.append("</g>")
    out.append(f'<text x="{_n(LEFT + pw / 2)}" y="{HEIGHT - 15}" text-anchor="middle">distance (tokens)</text>')
    out.append(
        f'<text x="18" y="{_n(TOP + ph / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_n(TOP + ph / 2)})">relative switching propensity'
        f'{" (log scale)" if style.log_y else ""}</text>'
    )

    if not values:
        out.append(
            f'<text class="no-data" x="{_n(LEFT + pw / 2)}" y="{_n(TOP + ph / 2)}" '
            f'text-anchor="middle" font-size="16" fill="#777">no data</text>'
        )
    else:
        if lo <= tf(1.0) <= hi:
            y1 = _n(sy(1.0))
            out.append(f'<line class="unity" x1="{LEFT}" y1="{y1}" x2="{LEFT + pw}" y2="{y1}" '
                       f'stroke="#999" stroke-dasharray="2,3"/>')
        diamonds = []
        for dr in spec.directions:
            for m in spec.modes:
                segs, cur = [], []
                for d in distances:
                    r = grid.results[(dr, m, d)]
                    v = r.rsp
                    if v is None or (style.log_y and v <= 0):
                        if cur:
                            segs.append(cur)
                        cur = []
                        continue
                    cur.append((sx(d), sy(v)))
                    if r.p_value >= alpha:
                        diamonds.append((sx(d), sy(v)))
                if cur:
                    segs.append(cur)
                path = " ".join(
                    "M" + " L".join(f"{_n(x)} {_n(y)}" for x, y in seg) for seg in segs
                )
                dash = style.dashes[m]
                dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(
                    f'<path class="series" data-direction="{dr}" data-mode="{m}" d="{path}" fill="none" '
                    f'stroke="{style.colors[dr]}" stroke-width="2"{dash_attr}/>'
                )
                for seg in segs:
                    for x, y in seg:
                        out.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="2.5" fill="{style.colors[dr]}"/>')
        s = style.diamond_size
        for x, y in diamonds:
            pts = f"{_n(x)},{_n(y - s)} {_n(x + s)},{_n(y)} {_n(x)},{_n(y + s)} {_n(x - s)},{_n(y)}"
            out.append(f'<polygon class="diamond" points="{pts}" fill="black"/>')

    # legend
    lx = LEFT + pw + 25
    ly = TOP + 10
    out.append('<g class="legend">')
    for dr in spec.directions:
        for m in spec.modes:
            dash = style.dashes[m]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="{style.colors[dr]}" '
                       f'stroke-width="2"{dash_attr}/>')
            label = f"{_direction_label(dr, grid.pair.l1, grid.pair.l2)} {m}"
            out.append(f'<text x="{lx + 38}" y="{ly + 4}">{escape(label)}</text>')
            ly += 20
    out.append(f'<text x="{lx}" y="{ly + 10}" font-size="11">black diamond: p ≥ {alpha:g}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
