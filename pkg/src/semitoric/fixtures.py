"""A library of valid semitoric polygons used by tests and the CLI examples."""
from __future__ import annotations

from fractions import Fraction

from .affine import INF, NEG_INF, TElement
from .cuts import SemitoricPolygon, flip, make_semitoric, t_act
from .polygon import PiecewiseLinear as PL

F = Fraction


def unit_square() -> SemitoricPolygon:
    return make_semitoric(PL.constant(0, 0, 1), PL.constant(1, 0, 1))


def trapezoid(length=2, height=1) -> SemitoricPolygon:
    """Bottom ``0`` on ``[0, L]``, top ``h`` then slope ``-1`` down to ``(L, 0)``."""
    return make_semitoric(PL.constant(0, 0, length),
                          PL.from_points([(0, height), (length - height, height), (length, 0)]))


def triangle(size=1) -> SemitoricPolygon:
    return make_semitoric(PL.constant(0, 0, size), PL.from_points([(0, size), (size, 0)]))


def p_plus(node_y=1) -> SemitoricPolygon:
    """Spin-oscillator polygon with the cut pointing up."""
    return make_semitoric(PL.constant(0, -1, INF),
                          PL.from_points([(-1, 0), (1, 2)], right_slope=0),
                          [(1, node_y, 1, 1)])


def p_minus(node_y=1) -> SemitoricPolygon:
    return flip(p_plus(node_y), (1,))


def p_plus_mirrored() -> SemitoricPolygon:
    """``x -> -x`` image of P+: unbounded to the left."""
    return make_semitoric(PL.constant(0, NEG_INF, 1),
                          PL.from_points([(-1, 2), (1, 0)], left_slope=0),
                          [(-1, 1, 1, 1)])


def compact_two_cuts() -> SemitoricPolygon:
    return make_semitoric(PL.constant(0, 0, 3),
                          PL.from_points([(0, 0), (1, 1), (2, 1), (3, 0)]),
                          [(1, F(1, 2), 1, 1), (2, F(1, 2), 1, 1)])


def double_node() -> SemitoricPolygon:
    """Two simple nodes on the same vertical line (the flip action is not free)."""
    return make_semitoric(PL.constant(0, 0, 2),
                          PL.from_points([(0, 0), (1, 1), (2, 0)]),
                          [(1, F(1, 4), 1, 1), (1, F(3, 4), 1, 1)])


def three_cuts() -> SemitoricPolygon:
    return make_semitoric(PL.constant(0, 0, 4),
                          PL.from_points([(0, 3), (1, 4), (2, 4), (3, 3), (4, 1)]),
                          [(1, 1, 1, 1), (2, 1, 1, 1), (3, 1, 1, 1)])


def opposite_cuts() -> SemitoricPolygon:
    """P- with an extra upward cut on the same line."""
    return make_semitoric(PL.from_points([(-1, 0), (1, 0), (3, 2)]),
                          PL.from_points([(-1, 0), (1, 2), (3, 2)]),
                          [(1, F(1, 2), 1, -1), (1, F(3, 2), 1, 1)])


def unbounded_double_node() -> SemitoricPolygon:
    return make_semitoric(PL.constant(0, 0, INF),
                          PL.from_points([(0, 1), (1, 3)], right_slope=0),
                          [(1, 1, 1, 1), (1, 2, 1, 1)])


def multiplicity_two() -> SemitoricPolygon:
    """A single node carrying two focus-focus points."""
    return make_semitoric(PL.constant(0, 0, INF),
                          PL.from_points([(0, 1), (1, 3)], right_slope=0),
                          [(1, F(3, 2), 2, 1)])


def cam_toric() -> SemitoricPolygon:
    """Coupled angular momenta at small coupling, radii 1 and 2."""
    return make_semitoric(PL.from_points([(-3, 0), (1, 0), (3, 2)]),
                          PL.from_points([(-3, 0), (-1, 2), (3, 2)]))


def cam_semitoric() -> SemitoricPolygon:
    return make_semitoric(PL.from_points([(-3, 0), (1, 0), (3, 2)]),
                          PL.from_points([(-3, 0), (-1, 2), (3, 2)]),
                          [(-1, 1, 1, 1)])


def rational_weights() -> SemitoricPolygon:
    return make_semitoric(PL.constant(0, 0, 4), PL.from_points([(0, 1), (2, 1), (4, 0)]))


def shifted_x(sp: SemitoricPolygon, dx) -> SemitoricPolygon:
    """Translate everything horizontally (an Aff(2, Z) move outside the vertical group)."""
    dx = F(dx)

    def move(chain: PL) -> PL:
        return PL(tuple(b + dx for b in chain.breakpoints), chain.values,
                  chain.left_slope, chain.right_slope)

    cuts = [(c.x + dx, c.y, c.k, c.eps) for c in sp.cuts]
    return make_semitoric(move(sp.polygon.bottom), move(sp.polygon.top), cuts)


def library() -> dict[str, SemitoricPolygon]:
    """Named fixtures; every entry passes ``validate``."""
    lib = {
        "unit_square": unit_square(),
        "trapezoid_2_1": trapezoid(2, 1),
        "trapezoid_3_1": trapezoid(3, 1),
        "trapezoid_5_2": trapezoid(5, 2),
        "triangle_1": triangle(1),
        "triangle_3": triangle(3),
        "p_plus": p_plus(),
        "p_minus": p_minus(),
        "p_plus_low_node": p_plus(F(1, 2)),
        "p_plus_high_node": p_plus(F(3, 2)),
        "p_plus_mirrored": p_plus_mirrored(),
        "compact_two_cuts": compact_two_cuts(),
        "double_node": double_node(),
        "three_cuts": three_cuts(),
        "opposite_cuts": opposite_cuts(),
        "unbounded_double_node": unbounded_double_node(),
        "multiplicity_two": multiplicity_two(),
        "cam_toric": cam_toric(),
        "cam_semitoric": cam_semitoric(),
        "rational_weights": rational_weights(),
    }
    lib["p_plus_sheared"] = t_act(lib["p_plus"], TElement(2, -3))
    lib["compact_two_cuts_sheared"] = t_act(lib["compact_two_cuts"], TElement(-1, F(1, 2)))
    lib["p_plus_shifted"] = shifted_x(lib["p_plus"], 2)
    lib["trapezoid_shifted"] = shifted_x(lib["trapezoid_2_1"], F(-7, 3))
    lib["compact_two_cuts_flipped"] = flip(lib["compact_two_cuts"], (1, 0))
    lib["three_cuts_flipped"] = flip(lib["three_cuts"], (0, 1, 0))
    lib["double_node_flipped"] = flip(lib["double_node"], (1, 1))
    return lib


def compact_fixture_names() -> list[str]:
    """Fixtures with at least two focus-focus points and a corner at an end of J."""
    out = []
    for name, sp in library().items():
        poly = sp.polygon
        if sp.m_f < 2:
            continue
        ends = [e for e in (poly.xmin, poly.xmax) if e not in (INF, NEG_INF)]
        if any(poly.bottom(e) == poly.top(e) for e in ends):
            out.append(name)
    return out
