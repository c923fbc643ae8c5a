"""Exact convex polygons described by a bottom and a top boundary chain.

A polygon is the region ``{(x, y) : xmin <= x <= xmax, bottom(x) <= y <= top(x)}``
where ``bottom`` is convex and ``top`` concave.  Either end may be infinite.
Vertical edges can only sit at finite ``xmin``/``xmax``.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .affine import (
    INF,
    NEG_INF,
    ExtendedRational,
    Point2,
    as_extended,
    as_rational,
    format_rational,
    is_finite,
    primitive_vector,
)


class PolygonError(ValueError):
    """Base class for invalid polygon data or queries."""


class NotConvex(PolygonError):
    pass


class EmptyInterior(PolygonError):
    pass


class OutOfDomain(PolygonError):
    pass


class UnboundedSlice(PolygonError):
    pass


class UnboundedArea(UnboundedSlice):
    pass


class NotAVertex(PolygonError):
    pass


def _opt(value) -> Optional[Fraction]:
    return None if value is None else as_rational(value)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function with exact rational data.

    ``left_slope``/``right_slope`` are given only when the domain is unbounded
    on that side.  Redundant collinear breakpoints are stripped on
    construction, so equality is structural.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    left_slope: Optional[Fraction] = None
    right_slope: Optional[Fraction] = None

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        vals = tuple(as_rational(v) for v in self.values)
        if not bps:
            raise ValueError("a piecewise-linear function needs at least one breakpoint")
        if len(bps) != len(vals):
            raise ValueError("breakpoints and values differ in length")
        if any(b0 >= b1 for b0, b1 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        left, right = _opt(self.left_slope), _opt(self.right_slope)
        bps, vals = _strip_collinear(bps, vals, left, right)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "left_slope", left)
        object.__setattr__(self, "right_slope", right)

    # construction helpers

    @classmethod
    def linear(cls, slope, intercept, lower=NEG_INF, upper=INF) -> "PiecewiseLinear":
        """``slope * x + intercept`` on ``[lower, upper]``."""
        slope, intercept = as_rational(slope), as_rational(intercept)
        lower, upper = as_extended(lower), as_extended(upper)
        pts = sorted({b for b in (lower, upper) if is_finite(b)}) or [Fraction(0)]
        return cls(
            tuple(pts),
            tuple(slope * p + intercept for p in pts),
            left_slope=None if is_finite(lower) else slope,
            right_slope=None if is_finite(upper) else slope,
        )

    @classmethod
    def constant(cls, value, lower=NEG_INF, upper=INF) -> "PiecewiseLinear":
        return cls.linear(0, value, lower, upper)

    @classmethod
    def ramp(cls, line_x, slope) -> "PiecewiseLinear":
        """``slope * max(0, x - line_x)`` on the whole line."""
        return cls((as_rational(line_x),), (Fraction(0),), Fraction(0), as_rational(slope))

    @classmethod
    def from_points(cls, points: Sequence[tuple], left_slope=None, right_slope=None):
        pts = sorted((as_rational(x), as_rational(y)) for x, y in points)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts), left_slope, right_slope)

    # domain

    @property
    def lower(self) -> ExtendedRational:
        return NEG_INF if self.left_slope is not None else self.breakpoints[0]

    @property
    def upper(self) -> ExtendedRational:
        return INF if self.right_slope is not None else self.breakpoints[-1]

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    @property
    def segment_slopes(self) -> tuple[Fraction, ...]:
        b, v = self.breakpoints, self.values
        return tuple((v[i + 1] - v[i]) / (b[i + 1] - b[i]) for i in range(len(b) - 1))

    def all_slopes(self) -> list[Fraction]:
        """Slopes of every piece from left to right, rays included."""
        slopes = list(self.segment_slopes)
        if self.left_slope is not None:
            slopes.insert(0, self.left_slope)
        if self.right_slope is not None:
            slopes.append(self.right_slope)
        return slopes

    @property
    def interior_breakpoints(self) -> tuple[Fraction, ...]:
        """Breakpoints that are not finite domain ends (genuine kinks)."""
        return tuple(b for b in self.breakpoints if self.lower < b < self.upper)

    # evaluation

    def __call__(self, x) -> Fraction:
        x = as_rational(x)
        if not self.contains(x):
            raise OutOfDomain(f"x = {format_rational(x)} outside [{format_rational(self.lower)}, "
                              f"{format_rational(self.upper)}]")
        b, v = self.breakpoints, self.values
        if x <= b[0]:
            return v[0] + (self.left_slope or 0) * (x - b[0])
        if x >= b[-1]:
            return v[-1] + (self.right_slope or 0) * (x - b[-1])
        i = bisect.bisect_right(b, x) - 1
        return v[i] + (v[i + 1] - v[i]) * (x - b[i]) / (b[i + 1] - b[i])

    def slope_right(self, x) -> Optional[Fraction]:
        """Slope of the piece just right of ``x``; None at a finite upper end."""
        x = as_rational(x)
        if x >= self.upper:
            return None
        b = self.breakpoints
        if x < b[0]:
            return self.left_slope
        i = bisect.bisect_right(b, x) - 1
        if i == len(b) - 1:
            return self.right_slope
        return (self.values[i + 1] - self.values[i]) / (b[i + 1] - b[i])

    def slope_left(self, x) -> Optional[Fraction]:
        """Slope of the piece just left of ``x``; None at a finite lower end."""
        x = as_rational(x)
        if x <= self.lower:
            return None
        b = self.breakpoints
        if x > b[-1]:
            return self.right_slope
        i = bisect.bisect_left(b, x)
        if i == 0:
            return self.left_slope
        return (self.values[i] - self.values[i - 1]) / (b[i] - b[i - 1])

    # algebra

    def __add__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        lo, hi = max(self.lower, other.lower), min(self.upper, other.upper)
        if lo > hi:
            raise ValueError("domains do not overlap")
        pts = set(self.breakpoints) | set(other.breakpoints)
        pts = {p for p in pts if lo <= p <= hi}
        pts |= {p for p in (lo, hi) if is_finite(p)}
        xs = tuple(sorted(pts))
        return PiecewiseLinear(
            xs,
            tuple(self(x) + other(x) for x in xs),
            left_slope=None if is_finite(lo) else self.left_slope + other.left_slope,
            right_slope=None if is_finite(hi) else self.right_slope + other.right_slope,
        )

    def scale(self, factor) -> "PiecewiseLinear":
        factor = as_rational(factor)
        return PiecewiseLinear(
            self.breakpoints,
            tuple(factor * v for v in self.values),
            None if self.left_slope is None else factor * self.left_slope,
            None if self.right_slope is None else factor * self.right_slope,
        )

    def __neg__(self) -> "PiecewiseLinear":
        return self.scale(-1)

    def __sub__(self, other: "PiecewiseLinear") -> "PiecewiseLinear":
        return self + (-other)

    def restrict(self, a, b) -> "PiecewiseLinear":
        a, b = as_rational(a), as_rational(b)
        if not (self.contains(a) and self.contains(b)) or a > b:
            raise OutOfDomain("restriction interval outside the domain")
        xs = (a,) + tuple(x for x in self.breakpoints if a < x < b) + ((b,) if b > a else ())
        return PiecewiseLinear(xs, tuple(self(x) for x in xs))

    def integral(self, a, b) -> Fraction:
        """Exact integral over ``[a, b]`` (trapezoids on every piece)."""
        part = self.restrict(a, b)
        bp, v = part.breakpoints, part.values
        return sum(((bp[i + 1] - bp[i]) * (v[i] + v[i + 1]) / 2 for i in range(len(bp) - 1)),
                   Fraction(0))

    def is_convex(self) -> bool:
        s = self.all_slopes()
        return all(s0 <= s1 for s0, s1 in zip(s, s[1:]))

    def is_concave(self) -> bool:
        s = self.all_slopes()
        return all(s0 >= s1 for s0, s1 in zip(s, s[1:]))


def _strip_collinear(bps, vals, left, right):
    n = len(bps)
    if n == 1:
        return bps, vals
    seg = [(vals[i + 1] - vals[i]) / (bps[i + 1] - bps[i]) for i in range(n - 1)]
    keep = []
    for i in range(n):
        before = left if i == 0 else seg[i - 1]
        after = right if i == n - 1 else seg[i]
        if before is None or after is None or before != after:
            keep.append(i)
    if not keep:
        # both ends unbounded and a single line: anchor at x = 0
        s = seg[0]
        return (Fraction(0),), (vals[0] - s * bps[0],)
    return tuple(bps[i] for i in keep), tuple(vals[i] for i in keep)


class CornerWeights(NamedTuple):
    """Primitive edge directions leaving a vertex, in counter-clockwise order.

    ``first`` is the edge traversed next when walking the boundary
    counter-clockwise, ``second`` the previous edge reversed.  Their first
    components are the isotropy weights.
    """

    a: int
    b: int
    unimodular: bool
    first: tuple[int, int]
    second: tuple[int, int]

    @property
    def det(self) -> int:
        return self.first[0] * self.second[1] - self.second[0] * self.first[1]


def sector_weights(first: tuple[int, int], second: tuple[int, int]) -> CornerWeights:
    det = first[0] * second[1] - second[0] * first[1]
    return CornerWeights(first[0], second[0], abs(det) == 1, first, second)


@dataclass(frozen=True)
class Polygon:
    bottom: PiecewiseLinear
    top: PiecewiseLinear

    def __post_init__(self):
        if (self.bottom.lower, self.bottom.upper) != (self.top.lower, self.top.upper):
            raise PolygonError("top and bottom chains have different domains")
        if not self.bottom.is_convex():
            raise NotConvex("bottom chain slopes decrease somewhere")
        if not self.top.is_concave():
            raise NotConvex("top chain slopes increase somewhere")
        width = self.top - self.bottom
        if any(v < 0 for v in width.values):
            raise EmptyInterior("bottom lies above top somewhere")
        if width.right_slope is not None and width.right_slope < 0:
            raise EmptyInterior("chains cross to the right")
        if width.left_slope is not None and width.left_slope > 0:
            raise EmptyInterior("chains cross to the left")

    @property
    def xmin(self) -> ExtendedRational:
        return self.bottom.lower

    @property
    def xmax(self) -> ExtendedRational:
        return self.bottom.upper

    @property
    def is_bounded(self) -> bool:
        return is_finite(self.xmin) and is_finite(self.xmax)

    def width(self) -> PiecewiseLinear:
        return self.top - self.bottom

    def contains(self, p: Point2, strict: bool = False) -> bool:
        if strict:
            return (self.xmin < p.x < self.xmax) and self.bottom(p.x) < p.y < self.top(p.x)
        return (self.xmin <= p.x <= self.xmax) and self.bottom(p.x) <= p.y <= self.top(p.x)

    def critical_abscissae(self) -> tuple[Fraction, ...]:
        """Finite ends and every breakpoint of either chain, sorted."""
        xs = set(self.bottom.breakpoints) | set(self.top.breakpoints)
        return tuple(sorted(xs))

    def vertices(self) -> list[Point2]:
        """Vertices ordered by x then y, each listed once."""
        pts = set()
        for chain in (self.bottom, self.top):
            for x in chain.interior_breakpoints:
                pts.add(Point2(x, chain(x)))
        for end in (self.xmin, self.xmax):
            if is_finite(end):
                pts.add(Point2(end, self.bottom(end)))
                pts.add(Point2(end, self.top(end)))
        return sorted(pts, key=lambda p: (p.x, p.y))

    def edge_directions(self, v: Point2) -> tuple[tuple[int, int], tuple[int, int]]:
        """(next edge, previous edge reversed) at vertex ``v`` in ccw order."""
        if v not in self.vertices():
            raise NotAVertex(f"{v} is not a vertex")
        x, y = v.x, v.y
        on_bottom, on_top = y == self.bottom(x), y == self.top(x)
        if x == self.xmin:
            up = (1, self.top.slope_right(x)) if x < self.xmax else None
            if on_bottom and on_top:
                if x == self.xmax:
                    raise NotAVertex("degenerate single-point polygon")
                return (primitive_vector(1, self.bottom.slope_right(x)),
                        primitive_vector(*up))
            if on_bottom:
                return primitive_vector(1, self.bottom.slope_right(x)), (0, 1)
            return (0, -1), primitive_vector(*up)
        if x == self.xmax:
            if on_bottom and on_top:
                return (primitive_vector(-1, self.top.slope_left(x)),
                        primitive_vector(-1, self.bottom.slope_left(x)))
            if on_bottom:
                return (0, 1), primitive_vector(-1, self.bottom.slope_left(x))
            return primitive_vector(-1, self.top.slope_left(x)), (0, -1)
        if on_bottom:
            return (primitive_vector(1, self.bottom.slope_right(x)),
                    primitive_vector(-1, self.bottom.slope_left(x)))
        return (primitive_vector(-1, self.top.slope_left(x)),
                primitive_vector(1, self.top.slope_right(x)))


def make_polygon(bottom: PiecewiseLinear, top: PiecewiseLinear, xmin=None, xmax=None) -> Polygon:
    """Validated constructor; ``xmin``/``xmax`` if given must match the chains."""
    for given, lo_hi in ((xmin, "lower"), (xmax, "upper")):
        if given is None:
            continue
        given = as_extended(given)
        if getattr(bottom, lo_hi) != given or getattr(top, lo_hi) != given:
            raise PolygonError(f"chain domains do not match {lo_hi} end {format_rational(given)}")
    return Polygon(bottom, top)


def vertical_slice(poly: Polygon, x) -> tuple[Fraction, Fraction]:
    x = as_rational(x)
    if not (poly.xmin <= x <= poly.xmax):
        raise OutOfDomain(f"x = {format_rational(x)} outside the polygon")
    return poly.bottom(x), poly.top(x)


def _truncation(poly: Polygon, truncate, error_cls) -> tuple[Fraction, Fraction]:
    if truncate is None:
        if not poly.is_bounded:
            raise error_cls("unbounded polygon needs a truncation interval")
        return poly.xmin, poly.xmax
    a, b = (as_rational(t) for t in truncate)
    if a > b or a < poly.xmin or b > poly.xmax:
        raise OutOfDomain("truncation interval outside the polygon domain")
    return a, b


def _level_interval(chain: PiecewiseLinear, a, b, y, below: bool):
    """Sub-interval of [a, b] where chain <= y (below) or chain >= y."""
    xs = [a] + [x for x in chain.breakpoints if a < x < b] + ([b] if b > a else [])
    ok = (lambda v: v <= y) if below else (lambda v: v >= y)
    lo = hi = None
    if len(xs) == 1:
        return (a, a) if ok(chain(a)) else None
    for x0, x1 in zip(xs, xs[1:]):
        g0, g1 = chain(x0), chain(x1)
        if ok(g0) and ok(g1):
            seg = (x0, x1)
        elif not ok(g0) and not ok(g1):
            continue
        else:
            xc = x0 + (y - g0) * (x1 - x0) / (g1 - g0)
            seg = (x0, xc) if ok(g0) else (xc, x1)
        lo = seg[0] if lo is None else min(lo, seg[0])
        hi = seg[1] if hi is None else max(hi, seg[1])
    return None if lo is None else (lo, hi)


def horizontal_slice(poly: Polygon, y, truncate=None) -> Fraction:
    """Length of ``{x in [a, b] : bottom(x) <= y <= top(x)}``."""
    y = as_rational(y)
    a, b = _truncation(poly, truncate, UnboundedSlice)
    below = _level_interval(poly.bottom, a, b, y, below=True)
    above = _level_interval(poly.top, a, b, y, below=False)
    if below is None or above is None:
        return Fraction(0)
    return max(Fraction(0), min(below[1], above[1]) - max(below[0], above[0]))


def area(poly: Polygon, truncate=None) -> Fraction:
    a, b = _truncation(poly, truncate, UnboundedArea)
    return poly.width().integral(a, b)


def corner_weights(poly: Polygon, v: Point2) -> CornerWeights:
    first, second = poly.edge_directions(v)
    return sector_weights(first, second)
