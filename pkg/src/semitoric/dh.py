"""Duistermaat-Heckman densities read off semitoric polygons.

``rho_J`` is the vertical slice length of the polygon.  Its derivative jumps
at rank-zero abscissae by ``-sum(k) - e+ - e-``, where each cut on the line
contributes its multiplicity and each elliptic boundary vertex contributes
``-1/(a b)`` in terms of its isotropy weights.  ``rho_K`` is the
horizontal slice length of a truncated polygon, assembled cell by cell from
vertical strips between consecutive critical abscissae.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .affine import as_rational, format_rational, is_finite
from .cuts import SemitoricPolygon, boundary_sector
from .polygon import UnboundedArea, UnboundedSlice, horizontal_slice

ZERO = Fraction(0)


class DHError(ValueError):
    pass


class WeightExtractionFailed(DHError):
    pass


class UnboundedTruncation(DHError, UnboundedSlice):
    pass


@dataclass(frozen=True)
class DHFunction:
    """Exact piecewise-linear density on the whole line, zero off its support.

    ``slopes[0]`` is the slope left of the first breakpoint, ``slopes[i]`` the
    slope between breakpoints ``i-1`` and ``i``, ``slopes[-1]`` the slope right
    of the last one.  One-sided limits are stored so that jumps (which occur
    for ``rho_K`` at flat polygon edges) are represented exactly.
    """

    variable: str
    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    left_limits: tuple[Fraction, ...]
    right_limits: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]

    def __call__(self, t) -> Fraction:
        t = as_rational(t)
        bp = self.breakpoints
        i = bisect.bisect_left(bp, t)
        if i < len(bp) and bp[i] == t:
            return self.values[i]
        if i == 0:
            return self.left_limits[0] + self.slopes[0] * (t - bp[0])
        return self.right_limits[i - 1] + self.slopes[i] * (t - bp[i - 1])

    def _piece(self, t, right: bool) -> int:
        t = as_rational(t)
        return bisect.bisect_right(self.breakpoints, t) if right else bisect.bisect_left(self.breakpoints, t)

    def derivative_right(self, t) -> Fraction:
        return self.slopes[self._piece(t, right=True)]

    def derivative_left(self, t) -> Fraction:
        return self.slopes[self._piece(t, right=False)]

    @property
    def is_continuous(self) -> bool:
        return self.values == self.left_limits == self.right_limits

    def integral(self, a=None, b=None) -> Fraction:
        """Exact integral over ``[a, b]`` (default: the whole line)."""
        bp = self.breakpoints
        lo = bp[0] if a is None else as_rational(a)
        hi = bp[-1] if b is None else as_rational(b)
        if a is None and (self.slopes[0] != 0 or self.left_limits[0] != 0):
            raise UnboundedArea("density does not vanish to the left")
        if b is None and (self.slopes[-1] != 0 or self.right_limits[-1] != 0):
            raise UnboundedArea("density does not vanish to the right")
        if lo >= hi:
            return ZERO
        cuts = [lo] + [x for x in bp if lo < x < hi] + [hi]
        total = ZERO
        for x0, x1 in zip(cuts, cuts[1:]):
            mid = (x0 + x1) / 2
            total += (x1 - x0) * self(mid)  # exact: linear on the open piece
        return total

    def to_dict(self) -> dict:
        f = format_rational
        return {
            "variable": self.variable,
            "breakpoints": [f(b) for b in self.breakpoints],
            "values": [f(v) for v in self.values],
            "left_limits": [f(v) for v in self.left_limits],
            "right_limits": [f(v) for v in self.right_limits],
            "slopes": [f(s) for s in self.slopes],
        }


def _tabulate(variable: str, breakpoints: Sequence[Fraction], f: Callable[[Fraction], Fraction],
              left_ray: Optional[Fraction] = None, right_ray: Optional[Fraction] = None) -> DHFunction:
    """Tabulate a function that is linear between consecutive breakpoints.

    Rays default to zero; pass ``left_ray``/``right_ray`` slopes to extend the
    outermost pieces instead.
    """
    bp = tuple(sorted(set(breakpoints)))
    values = tuple(f(b) for b in bp)
    right_limits, left_limits = [], [None] * len(bp)
    slopes = [ZERO]
    for i, (x0, x1) in enumerate(zip(bp, bp[1:])):
        p, q = x0 + (x1 - x0) / 3, x0 + 2 * (x1 - x0) / 3
        fp, fq = f(p), f(q)
        s = (fq - fp) / (q - p)
        slopes.append(s)
        right_limits.append(fp - s * (p - x0))
        left_limits[i + 1] = fp + s * (x1 - p)
    right_limits.append(ZERO)
    left_limits[0] = ZERO
    slopes.append(ZERO)
    if left_ray is not None:
        slopes[0], left_limits[0] = left_ray, values[0]
    if right_ray is not None:
        slopes[-1], right_limits[-1] = right_ray, values[-1]
    return DHFunction(variable, bp, values, tuple(left_limits), tuple(right_limits), tuple(slopes))


def rho_J(sp: SemitoricPolygon) -> DHFunction:
    """Density of the pushforward of Liouville measure by J (per |dx|/2pi)."""
    poly = sp.polygon
    width = poly.width()
    marks = set(width.breakpoints) | {c.x for c in sp.cuts}
    marks |= {e for e in (poly.xmin, poly.xmax) if is_finite(e)}
    return _tabulate("x", sorted(marks), width,
                     left_ray=width.left_slope, right_ray=width.right_slope)


@dataclass(frozen=True)
class JumpRecord:
    x: Fraction
    measured: Fraction
    predicted: Fraction
    k_sum: int
    e_plus: Fraction
    e_minus: Fraction

    def to_dict(self) -> dict:
        f = format_rational
        return {"x": f(self.x), "measured": f(self.measured), "predicted": f(self.predicted),
                "k_sum": self.k_sum, "e_plus": f(self.e_plus), "e_minus": f(self.e_minus)}


def elliptic_term(sp: SemitoricPolygon, x, side: str) -> Fraction:
    """``-1/(a b)`` for the elliptic vertex on the given side over ``x``, else 0."""
    sector = boundary_sector(sp, x, side)
    if sector is None:
        return ZERO
    if not sector.unimodular or sector.a == 0 or sector.b == 0:
        raise WeightExtractionFailed(
            f"{side} corner over x={format_rational(x)} has weights ({sector.a}, {sector.b}), "
            f"det {sector.det}")
    return Fraction(-1, sector.a * sector.b)


def jumps(sp: SemitoricPolygon) -> list[JumpRecord]:
    """Measured and predicted jumps of rho_J' at every interior critical abscissa."""
    rho = rho_J(sp)
    poly = sp.polygon
    out = []
    for x in rho.breakpoints:
        if not (poly.xmin < x < poly.xmax):
            continue
        measured = rho.derivative_right(x) - rho.derivative_left(x)
        e_plus = elliptic_term(sp, x, "top")
        e_minus = elliptic_term(sp, x, "bottom")
        k_sum = sp.multiplicity(x)
        if measured == 0 and k_sum == 0 and e_plus == 0 and e_minus == 0:
            continue
        out.append(JumpRecord(x, measured, -k_sum - e_plus - e_minus, k_sum, e_plus, e_minus))
    return out


def _cell_contribution(y: Fraction, h: Fraction, yb0, yb1, yt0, yt1) -> Fraction:
    """Horizontal slice length at height ``y`` inside one cell of width ``h``.

    Bottom ramp, full-width plateau and top ramp.  Ramps use the unordered
    interval between their end ordinates and vanish on flat edges.  The
    plateau counts +h where the strip is fully covered and -h where the two
    ramps overlap, which keeps the sum exact for every edge orientation.
    """
    lo_b, hi_b = min(yb0, yb1), max(yb0, yb1)
    lo_t, hi_t = min(yt0, yt1), max(yt0, yt1)
    ramp_b = ramp_t = ZERO
    if lo_b < hi_b and lo_b <= y <= hi_b:
        ramp_b = (y - lo_b) * h / (hi_b - lo_b)
    if lo_t < hi_t and lo_t <= y <= hi_t:
        ramp_t = (hi_t - y) * h / (hi_t - lo_t)
    covered_b = y > hi_b or (lo_b == hi_b and y == hi_b)
    covered_t = y < lo_t or (lo_t == hi_t and y == lo_t)
    plateau = h * (int(covered_b) + int(covered_t) - 1)
    return ramp_b + plateau + ramp_t


@dataclass(frozen=True)
class Cell:
    x0: Fraction
    x1: Fraction
    bottom: tuple[Fraction, Fraction]
    top: tuple[Fraction, Fraction]

    @property
    def h(self) -> Fraction:
        return self.x1 - self.x0

    @property
    def bottom_slope(self) -> Fraction:
        return (self.bottom[1] - self.bottom[0]) / self.h

    @property
    def top_slope(self) -> Fraction:
        return (self.top[1] - self.top[0]) / self.h


def _bounded_truncation(sp: SemitoricPolygon, truncate) -> tuple[Fraction, Fraction]:
    poly = sp.polygon
    if truncate is None:
        if not poly.is_bounded:
            raise UnboundedTruncation("rho_K of an unbounded polygon needs a truncation")
        return poly.xmin, poly.xmax
    a, b = (as_rational(t) for t in truncate)
    if a > b or a < poly.xmin or b > poly.xmax:
        raise UnboundedTruncation("truncation must be a bounded interval inside the domain")
    return a, b


def cells(sp: SemitoricPolygon, truncate=None) -> list[Cell]:
    """Vertical strips between consecutive critical abscissae of the truncation."""
    a, b = _bounded_truncation(sp, truncate)
    poly = sp.polygon
    xs = {a, b} | {x for x in poly.critical_abscissae() if a < x < b}
    xs |= {c.x for c in sp.cuts if a < c.x < b}
    xs = sorted(xs)
    return [Cell(x0, x1, (poly.bottom(x0), poly.bottom(x1)), (poly.top(x0), poly.top(x1)))
            for x0, x1 in zip(xs, xs[1:])]


def rho_K_value(cell_list: Sequence[Cell], y) -> Fraction:
    y = as_rational(y)
    return sum((_cell_contribution(y, c.h, *c.bottom, *c.top) for c in cell_list), ZERO)


def rho_K(sp: SemitoricPolygon, truncate=None) -> DHFunction:
    """Density of the pushforward by the second polygon coordinate on J^-1([a, b])."""
    cell_list = cells(sp, truncate)
    ys = {y for c in cell_list for y in (*c.bottom, *c.top)}
    return _tabulate("y", sorted(ys), lambda y: rho_K_value(cell_list, y))


def rho_K_oracle(sp: SemitoricPolygon, truncate, y) -> Fraction:
    return horizontal_slice(sp.polygon, y, truncate)


@dataclass
class CompactnessReport:
    j_bounded_below: bool
    j_bounded_above: bool
    forced_compact: bool
    fired: list[str] = field(default_factory=list)
    reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"j_bounded_below": self.j_bounded_below, "j_bounded_above": self.j_bounded_above,
                "forced_compact": self.forced_compact, "fired": list(self.fired),
                "reasons": list(self.reasons)}


def _has_rank_zero(sp: SemitoricPolygon) -> bool:
    if sp.m_f:
        return True
    poly = sp.polygon
    return bool(poly.vertices())


def compactness_report(sp: SemitoricPolygon) -> CompactnessReport:
    """Topological conclusions forced by the polygon data, and nothing stronger."""
    poly = sp.polygon
    below, above = is_finite(poly.xmin), is_finite(poly.xmax)
    rep = CompactnessReport(below, above, False)
    rho = rho_J(sp)
    total_k = sum(c.k for c in sp.cuts)

    if _has_rank_zero(sp):
        rep.fired.append("semi-bounded")
        rep.reasons.append("a rank-zero critical value exists, so J is bounded from below or above")
        if not (below or above):
            rep.reasons.append("inconsistent data: J is unbounded on both sides")

    if below:
        slope = rho.derivative_right(poly.xmin)
        if total_k > slope:
            rep.fired.append("count-below")
            rep.reasons.append(f"{total_k} focus-focus points exceed rho_J'(J_min+0) = "
                               f"{format_rational(slope)}: M is compact")
    if above:
        slope = -rho.derivative_left(poly.xmax)
        if total_k > slope:
            rep.fired.append("count-above")
            rep.reasons.append(f"{total_k} focus-focus points exceed -rho_J'(J_max-0) = "
                               f"{format_rational(slope)}: M is compact")

    if sp.m_f >= 2:
        for end, name in ((poly.xmin, "minimum"), (poly.xmax, "maximum")):
            if is_finite(end) and poly.bottom(end) == poly.top(end):
                rep.fired.append(f"unique-{name}")
                rep.reasons.append(f"m_f = {sp.m_f} >= 2 and J has a unique {name}: M is compact")

    rep.forced_compact = any(f.startswith(("count", "unique")) for f in rep.fired)
    if rep.forced_compact and not (below and above):
        rep.reasons.append("inconsistent data: compactness is forced but the polygon is unbounded")
    return rep
