from fractions import Fraction as F

import pytest

from semitoric.affine import INF, NEG_INF, Point2, TElement
from semitoric.cuts import (
    Cut,
    InvalidInput,
    SemitoricPolygon,
    TooManyCuts,
    Uncanonicalizable,
    canonical_element,
    canonical_form,
    flip,
    is_free_action,
    make_semitoric,
    orbit,
    orbit_sign_vectors,
    t_act,
    validate,
)
from semitoric.fixtures import (
    double_node,
    p_minus,
    p_plus,
    p_plus_mirrored,
    trapezoid,
    unit_square,
)
from semitoric.polygon import PiecewiseLinear as PL


def test_p_minus_data():
    pm = p_minus()
    assert pm.polygon.bottom == PL.from_points([(-1, 0), (1, 0)], right_slope=1)
    assert pm.polygon.top == PL.linear(1, 1, -1, INF)
    assert pm.cuts == (Cut(Point2(1, 1), 1, -1),)


class TestValidate:
    def test_spin_oscillator_is_valid(self):
        assert validate(p_plus()).ok

    def test_fake_cut_in_square(self):
        bad = make_semitoric(PL.constant(0, 0, 1), PL.constant(1, 0, 1), [(F(1, 2), F(1, 2), 1, 1)])
        report = validate(bad)
        assert not report.ok
        assert "SlopeCondition" in report.codes()
        assert "FlipNotConvex" in report.codes()

    def test_node_outside(self):
        bad = make_semitoric(PL.constant(0, 0, 1), PL.constant(1, 0, 1), [(F(1, 2), 3, 1, 1)])
        assert validate(bad).codes() == ["NodeOutside"]

    def test_node_on_boundary_is_outside(self):
        bad = make_semitoric(PL.constant(0, -1, INF), PL.from_points([(-1, 0), (1, 2)], right_slope=0),
                             [(1, 2, 1, 1)])
        assert "NodeOutside" in validate(bad).codes()

    def test_structural_codes(self):
        poly = p_plus().polygon
        bad = SemitoricPolygon(poly, (Cut(Point2(1, 1), 0, 1), Cut(Point2(1, 1), 1, 2)))
        codes = validate(bad).codes()
        assert {"BadMultiplicity", "BadSign", "DuplicateNode"} <= set(codes)

    def test_slope_condition_needs_full_multiplicity(self):
        # the top turns by -1 over x = 1 but the node carries k = 2
        bad = make_semitoric(PL.constant(0, -1, INF), PL.from_points([(-1, 0), (1, 2)], right_slope=0),
                             [(1, 1, 2, 1)])
        assert "SlopeCondition" in validate(bad).codes()

    def test_too_many_cuts_for_orbit_check(self):
        report = validate(p_plus(), max_cuts=0)
        assert report.codes() == ["TooManyCuts"]

    def test_non_unimodular_corner(self):
        tri = make_semitoric(PL.constant(0, 0, 1), PL.from_points([(0, 2), (1, 0)]))
        assert validate(tri).codes() == ["CornerNotUnimodular"]


class TestFlip:
    def test_p_minus_to_p_plus(self):
        assert flip(p_minus(), (1,)) == p_plus()

    def test_zero_bits_identity(self):
        sp = double_node()
        assert flip(sp, (0, 0)) == sp

    def test_involution(self):
        sp = double_node()
        assert flip(flip(sp, (1, 0)), (1, 0)) == sp

    def test_bad_bits(self):
        with pytest.raises(InvalidInput):
            flip(p_plus(), (1, 0))
        with pytest.raises(InvalidInput):
            flip(p_plus(), (2,))

    def test_flip_into_nonconvex_raises(self):
        bad = make_semitoric(PL.constant(0, 0, 1), PL.constant(1, 0, 1), [(F(1, 2), F(1, 2), 1, 1)])
        with pytest.raises(InvalidInput):
            flip(bad, (1,))

    def test_nodes_fixed_by_own_shear(self):
        sp = p_plus()
        assert flip(sp, (1,)).nodes == sp.nodes


class TestOrbit:
    def test_spin_oscillator(self):
        elems = orbit(p_plus())
        assert len(elems) == 2
        assert [e.duplicate_of for e in elems] == [None, None]
        assert {e.polygon for e in elems} == {canonical_form(p_plus()), canonical_form(p_minus())}

    def test_toric(self):
        sq = unit_square()
        assert [e.polygon for e in orbit(sq)] == [sq]

    def test_shared_abscissa_has_duplicates(self):
        elems = orbit(double_node())
        assert len(elems) == 4
        flagged = [e.duplicate_of for e in elems]
        assert flagged == [None, None, 1, None]
        assert orbit_sign_vectors(elems) == {(1, 1), (-1, 1), (1, -1), (-1, -1)}

    def test_unequal_multiplicities_on_one_line_are_not_duplicates(self):
        sp = make_semitoric(PL.constant(0, 0, INF), PL.from_points([(0, 1), (1, 4)], right_slope=0),
                            [(1, 1, 1, 1), (1, 2, 2, 1)])
        assert validate(sp).ok
        assert not is_free_action(sp)
        assert all(e.duplicate_of is None for e in orbit(sp))

    def test_bound(self):
        with pytest.raises(TooManyCuts):
            orbit(double_node(), max_cuts=1)


class TestFreeness:
    def test_examples(self):
        assert is_free_action(p_plus())
        assert not is_free_action(double_node())
        sp = make_semitoric(PL.constant(0, 0, 3), PL.from_points([(0, 0), (1, 1), (2, 1), (3, 0)]),
                            [(1, F(1, 2), 1, 1), (2, F(1, 2), 1, 1)])
        assert is_free_action(sp)


class TestTAction:
    def test_translation(self):
        moved = t_act(p_plus(), TElement(0, 3))
        assert moved.polygon.bottom(5) == 3 and moved.polygon.top(0) == 4
        assert moved.nodes == (Point2(1, 4),)

    def test_shear_of_square(self):
        img = t_act(unit_square(), TElement(1, 0))
        assert [tuple(v) for v in img.polygon.vertices()] == [(0, 0), (0, 1), (1, 1), (1, 2)]

    def test_inverse(self):
        g = TElement(3, F(-5, 2))
        assert t_act(t_act(p_plus(), g), g.inverse()) == p_plus()

    def test_keeps_cut_data(self):
        img = t_act(p_minus(), TElement(-2, 1))
        assert [(c.k, c.eps) for c in img.cuts] == [(1, -1)]


class TestCanonical:
    def test_p_plus_is_canonical(self):
        assert canonical_form(p_plus()) == p_plus()

    def test_round_trip(self):
        assert canonical_form(t_act(p_plus(), TElement(1, 5))) == p_plus()

    def test_trapezoid_shifted_up(self):
        assert canonical_form(t_act(trapezoid(), TElement(0, 7))) == trapezoid()

    def test_slope_window(self):
        sp = t_act(trapezoid(), TElement(-3, F(1, 3)))
        c = canonical_form(sp)
        assert c.polygon.bottom(0) == 0
        assert 0 <= c.polygon.bottom.slope_right(0) < 1
        assert canonical_form(c) == c

    def test_right_end_used_when_left_infinite(self):
        sp = p_plus_mirrored()
        g = canonical_element(t_act(sp, TElement(2, 1)))
        assert t_act(t_act(sp, TElement(2, 1)), g) == canonical_form(sp)

    def test_both_ends_infinite(self):
        strip = make_semitoric(PL.constant(0, NEG_INF, INF), PL.constant(1, NEG_INF, INF))
        with pytest.raises(Uncanonicalizable):
            canonical_form(strip)
