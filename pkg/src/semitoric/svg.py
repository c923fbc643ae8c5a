"""Static SVG drawings of semitoric polygons and DH densities."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .affine import is_finite
from .cuts import SemitoricPolygon
from .dh import DHFunction

_W, _H, _PAD = 480, 360, 30


def _frame(xs: Sequence[float], ys: Sequence[float]):
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    sx = (_W - 2 * _PAD) / (x1 - x0)
    sy = (_H - 2 * _PAD) / (y1 - y0)
    s = min(sx, sy)

    def to_px(x, y):
        return _PAD + (x - x0) * s, _H - _PAD - (y - y0) * s

    return to_px


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _header() -> list[str]:
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>']


def polygon_svg(sp: SemitoricPolygon, ray_length=2) -> str:
    """Filled polygon, dashed cuts and node dots.  Infinite ends are clipped."""
    poly = sp.polygon
    lo = poly.xmin if is_finite(poly.xmin) else min(poly.bottom.breakpoints + poly.top.breakpoints) - ray_length
    hi = poly.xmax if is_finite(poly.xmax) else max(poly.bottom.breakpoints + poly.top.breakpoints) + ray_length
    xs = sorted({Fraction(lo), Fraction(hi)} | {x for x in poly.critical_abscissae() if lo <= x <= hi})
    bottom = [(float(x), float(poly.bottom(x))) for x in xs]
    top = [(float(x), float(poly.top(x))) for x in reversed(xs)]
    pts = bottom + top
    nodes = [(float(c.x), float(c.y)) for c in sp.cuts]
    to_px = _frame([p[0] for p in pts + nodes], [p[1] for p in pts + nodes])
    out = _header()
    path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (to_px(*p) for p in pts))
    out.append(f'<polygon points="{path}" fill="#dde8f5" stroke="#1f3b63" stroke-width="1.5"/>')
    for c in sp.cuts:
        end_y = poly.top(c.x) if c.eps == 1 else poly.bottom(c.x)
        (ax, ay), (bx, by) = to_px(float(c.x), float(c.y)), to_px(float(c.x), float(end_y))
        out.append(f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                   f'stroke="#b03030" stroke-dasharray="4 3"/>')
        out.append(f'<circle cx="{_fmt(ax)}" cy="{_fmt(ay)}" r="3.5" fill="#b03030"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def density_svg(f: DHFunction, margin=1) -> str:
    """Graph of a DH density over its breakpoints, with jumps drawn vertically."""
    bp = [float(b) for b in f.breakpoints]
    lo, hi = bp[0] - margin, bp[-1] + margin
    pts = [(lo, float(f(Fraction(lo).limit_denominator(10 ** 6))))]
    for b, left, v, right in zip(f.breakpoints, f.left_limits, f.values, f.right_limits):
        pts += [(float(b), float(left)), (float(b), float(v)), (float(b), float(right))]
    pts.append((hi, float(f(Fraction(hi).limit_denominator(10 ** 6)))))
    to_px = _frame([p[0] for p in pts], [p[1] for p in pts] + [0.0])
    out = _header()
    path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (to_px(*p) for p in pts))
    out.append(f'<polyline points="{path}" fill="none" stroke="#1f3b63" stroke-width="1.5"/>')
    (ax, ay), (bx, by) = to_px(lo, 0.0), to_px(hi, 0.0)
    out.append(f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" stroke="#888"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
