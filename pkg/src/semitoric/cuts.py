"""Polygons decorated with focus-focus cuts, and the group acting on them.

A :class:`SemitoricPolygon` carries, for each focus-focus value, its node in
polygon coordinates, the multiplicity ``k`` and the direction ``eps`` of its
vertical cut.  Flipping a set of cuts applies the piecewise shear
``t^(u*eps*k)`` about each flipped cut line and reverses those cuts.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .affine import (
    Point2,
    TElement,
    VerticalShear,
    apply_multi_shear,
    as_rational,
    format_rational,
    is_finite,
    primitive_vector,
)
from .polygon import CornerWeights, PiecewiseLinear, Polygon, PolygonError, corner_weights, sector_weights

DEFAULT_MAX_CUTS = 16

# issues that make the flip orbit meaningless to enumerate
_STRUCTURAL = ("BadSign", "BadMultiplicity", "DuplicateNode", "NodeOutside")


class SemitoricError(ValueError):
    pass


class InvalidInput(SemitoricError):
    pass


class TooManyCuts(SemitoricError):
    pass


class Uncanonicalizable(SemitoricError):
    pass


@dataclass(frozen=True)
class Cut:
    node: Point2
    k: int = 1
    eps: int = 1

    @property
    def x(self) -> Fraction:
        return self.node.x

    @property
    def y(self) -> Fraction:
        return self.node.y


@dataclass(frozen=True)
class SemitoricPolygon:
    polygon: Polygon
    cuts: tuple[Cut, ...] = ()

    def __post_init__(self):
        cuts = tuple(sorted(self.cuts, key=lambda c: (c.node.x, c.node.y)))
        object.__setattr__(self, "cuts", cuts)

    @property
    def m_f(self) -> int:
        return len(self.cuts)

    @property
    def eps(self) -> tuple[int, ...]:
        return tuple(c.eps for c in self.cuts)

    @property
    def nodes(self) -> tuple[Point2, ...]:
        return tuple(c.node for c in self.cuts)

    def multiplicity(self, x, eps: Optional[int] = None) -> int:
        """Summed multiplicity of cuts on the line through ``x`` (optionally one direction)."""
        return sum(c.k for c in self.cuts if c.x == x and (eps is None or c.eps == eps))

    def cut_abscissae(self) -> tuple[Fraction, ...]:
        return tuple(sorted({c.x for c in self.cuts}))


# --- validation -----------------------------------------------------------


class Issue(NamedTuple):
    code: str
    message: str
    witness: object = None


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def add(self, code: str, message: str, witness=None):
        self.issues.append(Issue(code, message, witness))


def boundary_sector(sp: SemitoricPolygon, x, side: str) -> Optional[CornerWeights]:
    """Smooth local sector at the boundary point over interior abscissa ``x``.

    The cuts reaching that boundary point make the drawn polygon bend by their
    summed multiplicity; undoing that bend gives the sector of the local toric
    chart.  Returns None when the corrected boundary is straight (no elliptic
    vertex there).
    """
    poly = sp.polygon
    if side == "top":
        left = poly.top.slope_left(x)
        right = poly.top.slope_right(x) + sp.multiplicity(x, eps=1)
        if left == right:
            return None
        return sector_weights(primitive_vector(-1, left), primitive_vector(1, right))
    left = poly.bottom.slope_left(x)
    right = poly.bottom.slope_right(x) - sp.multiplicity(x, eps=-1)
    if left == right:
        return None
    return sector_weights(primitive_vector(1, right), primitive_vector(-1, left))


def _local_issues(sp: SemitoricPolygon, report: ValidationReport, label: str = ""):
    poly = sp.polygon
    seen = set()
    for cut in sp.cuts:
        if cut.eps not in (1, -1):
            report.add("BadSign", f"{label}cut at {cut.node} has eps={cut.eps}", cut)
        if not isinstance(cut.k, int) or cut.k < 1:
            report.add("BadMultiplicity", f"{label}cut at {cut.node} has k={cut.k}", cut)
        if cut.node in seen:
            report.add("DuplicateNode", f"{label}node {cut.node} appears twice", cut)
        seen.add(cut.node)
        if not (poly.xmin < cut.x < poly.xmax) or not poly.contains(cut.node, strict=True):
            report.add("NodeOutside", f"{label}node {cut.node} is not strictly inside", cut)
    if any(i.code in _STRUCTURAL for i in report.issues):
        return

    for x in sp.cut_abscissae():
        k_up, k_down = sp.multiplicity(x, 1), sp.multiplicity(x, -1)
        if k_up:
            turn = poly.top.slope_right(x) - poly.top.slope_left(x)
            if turn > -k_up:
                report.add("SlopeCondition",
                           f"{label}top turns by {format_rational(turn)} at x={format_rational(x)}, "
                           f"needs <= {-k_up}", x)
        if k_down:
            turn = poly.bottom.slope_right(x) - poly.bottom.slope_left(x)
            if turn < k_down:
                report.add("SlopeCondition",
                           f"{label}bottom turns by {format_rational(turn)} at x={format_rational(x)}, "
                           f"needs >= {k_down}", x)

    cut_lines = set(sp.cut_abscissae())
    for v in poly.vertices():
        interior = poly.xmin < v.x < poly.xmax
        if interior and v.x in cut_lines:
            on_cut = any(
                c.x == v.x and ((c.eps == 1 and v.y == poly.top(v.x))
                                or (c.eps == -1 and v.y == poly.bottom(v.x)))
                for c in sp.cuts)
            if on_cut:
                side = "top" if v.y == poly.top(v.x) else "bottom"
                sector = boundary_sector(sp, v.x, side)
                if sector is not None and not sector.unimodular:
                    report.add("CutSectorNotUnimodular",
                               f"{label}corrected sector at {v} has det {sector.det}", v)
                continue
        w = corner_weights(poly, v)
        if not w.unimodular:
            report.add("CornerNotUnimodular", f"{label}corner {v} has det {w.det}", v)


def validate(sp: SemitoricPolygon, max_cuts: int = DEFAULT_MAX_CUTS) -> ValidationReport:
    """Check every invariant; an empty report means the data is valid."""
    report = ValidationReport()
    _local_issues(sp, report)
    if any(i.code in _STRUCTURAL for i in report.issues):
        return report
    if sp.m_f > max_cuts:
        report.add("TooManyCuts", f"m_f = {sp.m_f} exceeds the orbit bound {max_cuts}")
        return report
    for bits in itertools.product((0, 1), repeat=sp.m_f):
        if not any(bits):
            continue
        tag = "".join(map(str, bits))
        try:
            image = _flip(sp, bits)
        except PolygonError as exc:
            report.add("FlipNotConvex", f"flip {tag}: {exc}", bits)
            continue
        _local_issues(image, report, label=f"flip {tag}: ")
    return report


# --- group actions --------------------------------------------------------


def _shift_chains(sp: SemitoricPolygon, offset: PiecewiseLinear, node_map, cuts_eps=None):
    poly = Polygon(sp.polygon.bottom + offset, sp.polygon.top + offset)
    cuts = []
    for i, c in enumerate(sp.cuts):
        eps = c.eps if cuts_eps is None else cuts_eps[i]
        cuts.append(Cut(node_map(c.node), c.k, eps))
    return SemitoricPolygon(poly, tuple(cuts))


def flip_shears(sp: SemitoricPolygon, bits: Sequence[int]) -> list[VerticalShear]:
    """The shears ``t^(u_i * eps_i * k_i)`` about each flipped cut line."""
    return [VerticalShear(c.x, c.eps * c.k) for c, u in zip(sp.cuts, bits) if u]


def _flip(sp: SemitoricPolygon, bits: Sequence[int]) -> SemitoricPolygon:
    bits = tuple(int(b) for b in bits)
    if len(bits) != sp.m_f or any(b not in (0, 1) for b in bits):
        raise InvalidInput(f"need {sp.m_f} bits in {{0, 1}}, got {bits}")
    shears = flip_shears(sp, bits)
    offset = PiecewiseLinear.constant(0)
    for s in shears:
        offset = offset + PiecewiseLinear.ramp(s.line_x, s.exponent)
    new_eps = [-c.eps if u else c.eps for c, u in zip(sp.cuts, bits)]
    return _shift_chains(sp, offset, lambda p: apply_multi_shear(shears, p), new_eps)


def flip(sp: SemitoricPolygon, bits: Sequence[int]) -> SemitoricPolygon:
    """Reverse the cuts selected by ``bits`` (the (Z/2)^m_f action)."""
    try:
        return _flip(sp, bits)
    except PolygonError as exc:
        raise InvalidInput(f"flip produced an invalid polygon: {exc}") from exc


def t_act(sp: SemitoricPolygon, g: TElement) -> SemitoricPolygon:
    """Apply ``(x, y) -> (x, y + k x + c)`` to boundary and nodes."""
    offset = PiecewiseLinear.linear(g.shear_k, g.vertical_offset)
    return _shift_chains(sp, offset, g)


def is_free_action(sp: SemitoricPolygon) -> bool:
    return len({c.x for c in sp.cuts}) == sp.m_f


def canonical_element(sp: SemitoricPolygon) -> TElement:
    """The element of the vertical-line group taking ``sp`` to canonical form."""
    poly = sp.polygon
    if is_finite(poly.xmin):
        x0 = poly.xmin
        slope = poly.bottom.slope_right(x0)
    elif is_finite(poly.xmax):
        x0 = poly.xmax
        slope = poly.bottom.slope_left(x0)
    else:
        raise Uncanonicalizable("both ends of the polygon are infinite")
    k = 0 if slope is None else -(slope.numerator // slope.denominator)
    c = -(poly.bottom(x0) + k * x0)
    return TElement(k, c)


def canonical_form(sp: SemitoricPolygon) -> SemitoricPolygon:
    """Representative with bottom = 0 at the left end and first bottom slope in [0, 1).

    Falls back to the right end when the left end is infinite.
    """
    return t_act(sp, canonical_element(sp))


class OrbitElement(NamedTuple):
    bits: tuple[int, ...]
    polygon: SemitoricPolygon
    duplicate_of: Optional[int]


def _image_key(sp: SemitoricPolygon):
    return sp.polygon, sp.nodes


def orbit(sp: SemitoricPolygon, max_cuts: int = DEFAULT_MAX_CUTS) -> list[OrbitElement]:
    """All 2^m_f flips in canonical form.

    An element whose polygon and nodes coincide with an earlier one is kept
    and marked with the index of that earlier element.
    """
    if sp.m_f > max_cuts:
        raise TooManyCuts(f"m_f = {sp.m_f} exceeds {max_cuts}")
    out: list[OrbitElement] = []
    first_seen: dict = {}
    for bits in itertools.product((0, 1), repeat=sp.m_f):
        image = canonical_form(flip(sp, bits))
        key = _image_key(image)
        out.append(OrbitElement(bits, image, first_seen.get(key)))
        first_seen.setdefault(key, len(out) - 1)
    return out


def orbit_sign_vectors(elements: Iterable[OrbitElement]) -> set[tuple[int, ...]]:
    return {e.polygon.eps for e in elements}


def make_semitoric(bottom: PiecewiseLinear, top: PiecewiseLinear,
                   cuts: Iterable[tuple] = ()) -> SemitoricPolygon:
    """Convenience constructor from chains and ``(x, y, k, eps)`` tuples."""
    cut_objs = []
    for item in cuts:
        x, y, k, eps = item
        cut_objs.append(Cut(Point2(as_rational(x), as_rational(y)), int(k), int(eps)))
    return SemitoricPolygon(Polygon(bottom, top), tuple(cut_objs))
