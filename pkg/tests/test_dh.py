from fractions import Fraction as F

import pytest

from semitoric.dh import (
    UnboundedTruncation,
    WeightExtractionFailed,
    cells,
    compactness_report,
    jumps,
    rho_J,
    rho_K,
    rho_K_oracle,
)
from semitoric.cuts import make_semitoric
from semitoric.fixtures import compact_two_cuts, p_plus, rational_weights, trapezoid, unit_square
from semitoric.polygon import PiecewiseLinear as PL, UnboundedArea, area


def grid(lo, hi, n=12):
    return [lo + (hi - lo) * F(i, n) for i in range(-2, n + 3)]


class TestRhoJ:
    def test_spin_oscillator(self):
        f = rho_J(p_plus())
        assert f.breakpoints == (-1, 1)
        assert [f(x) for x in (-2, -1, 0, 1, 7)] == [0, 0, 1, 2, 2]
        assert f.slopes == (0, 1, 0)

    def test_square(self):
        f = rho_J(unit_square())
        assert [f(x) for x in (0, F(1, 2), 1)] == [1, 1, 1]
        assert f.left_limits[0] == 0 and f.right_limits[-1] == 0

    def test_trapezoid(self):
        f = rho_J(trapezoid())
        assert [f(x) for x in (0, F(1, 2), 1, F(3, 2), 2)] == [1, 1, 1, F(1, 2), 0]

    def test_node_abscissae_are_breakpoints(self):
        sp = make_semitoric(PL.constant(0, 0, 3), PL.from_points([(0, 2), (3, 2)]),
                            [])
        assert rho_J(compact_two_cuts()).breakpoints == (0, 1, 2, 3)
        assert rho_J(sp).breakpoints == (0, 3)

    def test_integral(self, fixture_library):
        for name in ("unit_square", "trapezoid_5_2", "cam_semitoric", "three_cuts"):
            sp = fixture_library[name]
            assert rho_J(sp).integral() == area(sp.polygon)

    def test_unbounded_integral(self):
        with pytest.raises(UnboundedArea):
            rho_J(p_plus()).integral()
        assert rho_J(p_plus()).integral(-1, 3) == 6


class TestJumps:
    def test_spin_oscillator(self):
        (j,) = jumps(p_plus())
        assert (j.x, j.measured, j.predicted, j.k_sum, j.e_plus, j.e_minus) == (1, -1, -1, 1, 0, 0)

    def test_trapezoid(self):
        (j,) = jumps(trapezoid())
        assert (j.x, j.measured, j.predicted, j.k_sum, j.e_plus) == (1, -1, -1, 0, 1)

    def test_square(self):
        assert jumps(unit_square()) == []

    def test_rational_weight(self):
        (j,) = jumps(rational_weights())
        assert (j.measured, j.predicted, j.e_plus) == (F(-1, 2), F(-1, 2), F(1, 2))

    def test_weight_extraction_failure(self):
        sp = make_semitoric(PL.constant(0, 0, 2), PL.from_points([(0, 2), (1, 2), (2, 0)]))
        with pytest.raises(WeightExtractionFailed):
            jumps(sp)

    def test_telescoping(self, fixture_library):
        inf = float("inf")
        for sp in fixture_library.values():
            f = rho_J(sp)
            poly = sp.polygon
            slope = f.slopes[0] if poly.xmin == -inf else f.derivative_right(poly.xmin)
            for j in jumps(sp):
                assert f.derivative_left(j.x) == slope
                slope += j.measured
            assert slope == (f.slopes[-1] if poly.xmax == inf else f.derivative_left(poly.xmax))


class TestRhoK:
    def test_spin_oscillator(self):
        f = rho_K(p_plus(), (-1, 3))
        assert [f(y) for y in (-1, 0, 1, F(3, 2), 2)] == [0, 4, 3, F(5, 2), 2]
        assert f(F(5, 2)) == 0
        # the flat top edge makes the density jump
        assert f.right_limits[-1] == 0 and f.left_limits[-1] == 2
        assert not f.is_continuous

    def test_square(self):
        f = rho_K(unit_square())
        assert [f(y) for y in (0, F(1, 3), 1)] == [1, 1, 1]

    def test_trapezoid(self):
        f = rho_K(trapezoid())
        assert [f(y) for y in (0, F(1, 2), 1)] == [2, F(3, 2), 1]

    def test_oracle(self):
        assert rho_K_oracle(p_plus(), (-1, 3), 1) == 3 == rho_K(p_plus(), (-1, 3))(1)
        assert rho_K_oracle(trapezoid(), None, 0) == 2
        assert rho_K_oracle(trapezoid(), None, 9) == 0

    @pytest.mark.parametrize("name", ["compact_two_cuts_sheared", "p_plus_sheared", "cam_toric",
                                      "rational_weights", "three_cuts_flipped"])
    def test_every_edge_orientation(self, fixture_library, name):
        sp = fixture_library[name]
        trunc = None if sp.polygon.is_bounded else (sp.polygon.bottom.breakpoints[0],
                                                    sp.polygon.bottom.breakpoints[0] + 3)
        f = rho_K(sp, trunc)
        for y in grid(f.breakpoints[0], f.breakpoints[-1]):
            assert f(y) == rho_K_oracle(sp, trunc, y)

    def test_integral_equals_area(self, fixture_library):
        sp = fixture_library["trapezoid_5_2"]
        assert rho_K(sp).integral() == area(sp.polygon) == rho_J(sp).integral()

    def test_cells_include_truncation_ends(self):
        cs = cells(p_plus(), (F(-1, 2), F(5, 2)))
        assert [(c.x0, c.x1) for c in cs] == [(F(-1, 2), 1), (1, F(5, 2))]

    def test_unbounded_truncation(self):
        with pytest.raises(UnboundedTruncation):
            rho_K(p_plus())
        with pytest.raises(UnboundedTruncation):
            rho_K(unit_square(), (0, 2))


class TestCompactness:
    def test_spin_oscillator_not_forced(self):
        rep = compactness_report(p_plus())
        assert not rep.forced_compact
        assert rep.j_bounded_below and not rep.j_bounded_above
        assert not any(f.startswith(("count", "unique")) for f in rep.fired)

    def test_two_nodes_and_corner_minimum(self):
        rep = compactness_report(compact_two_cuts())
        assert rep.forced_compact
        assert "unique-minimum" in rep.fired and "count-below" in rep.fired

    def test_toric_square(self):
        rep = compactness_report(unit_square())
        assert not rep.forced_compact
        assert rep.j_bounded_below and rep.j_bounded_above

    def test_initial_slope_bound_at_unimodular_corner(self, fixture_library):
        for sp in fixture_library.values():
            poly = sp.polygon
            x0 = poly.xmin
            if x0 in (float("-inf"),) or poly.bottom(x0) != poly.top(x0):
                continue
            assert rho_J(sp).derivative_right(x0) <= 1
