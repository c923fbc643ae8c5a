import math
from fractions import Fraction as F

import numpy as np
import pytest

from semitoric.cuts import validate
from semitoric.dh import jumps, rho_J
from semitoric.fixtures import p_minus, p_plus
from semitoric.systems import (
    CoupledAngularMomenta,
    FitFailure,
    InvalidPoint,
    NotCritical,
    OutOfRange,
    PhasePoint,
    SpinOscillator,
    ValidationFailure,
    default_grid,
    focus_interval,
    make_model,
    polygonize,
    polygonize_report,
    snap,
    theta_measure,
)

SOUTH = PhasePoint((0.0, 0.0, -1.0, 0.0, 0.0), "A")
NORTH = PhasePoint((0.0, 0.0, 1.0, 0.0, 0.0), "B")


def spin_point(rng):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return PhasePoint((*v, *rng.normal(size=2)))


class TestMoments:
    @pytest.mark.parametrize("t", [0, 0.25, 0.5, 1.2])
    def test_poles(self, t):
        m = SpinOscillator(t)
        assert m.eval_moment(SOUTH) == pytest.approx((-1, 1 - 2 * t), abs=1e-15)
        assert m.eval_moment(NORTH) == pytest.approx((1, -1 + 2 * t), abs=1e-15)

    def test_half_coupling_is_half_k(self):
        # (1 - 2t) vanishes, leaving t K
        rng = np.random.default_rng(4)
        m = SpinOscillator(F(1, 2))
        for _ in range(5):
            p = spin_point(rng)
            x, y, z, u, v = p.coords
            assert m.eval_moment(p)[1] == pytest.approx((u * x + v * y) / 2, abs=1e-14)
            assert m.eval_moment(p)[0] == pytest.approx((u * u + v * v) / 2 + z, abs=1e-14)

    def test_cam_formula(self):
        m = CoupledAngularMomenta(0.3, (1, 2))
        s = np.array([0.6, 0.0, 0.8])
        n = np.array([0.0, 2.0, 0.0])
        j, h = m.eval_moment(PhasePoint((*s, *n)))
        assert j == pytest.approx(0.8)
        assert h == pytest.approx(0.7 * 0.8 + 0.3 / 2 * float(s @ n))

    def test_invalid_point(self):
        with pytest.raises(InvalidPoint):
            SpinOscillator(0).eval_moment(PhasePoint((0.0, 0.0, 0.5, 0.0, 0.0)))
        with pytest.raises(InvalidPoint):
            SpinOscillator(0).eval_moment(PhasePoint((0.0, 0.0, 1.0)))


class TestRankZero:
    def test_spin(self):
        m = SpinOscillator(0.5)
        pts = m.critical_points_rank0()
        assert [p.label for p in pts] == ["A", "B"]
        assert all(m.tangent_gradient_norm(w, p) < 1e-10 for p in pts for w in "HJ")

    def test_cam(self):
        m = CoupledAngularMomenta(0.5, (1, 2))
        pts = m.critical_points_rank0()
        assert len(pts) == 4
        assert sorted(m.eval_moment(p)[0] for p in pts) == [-3, -1, 1, 3]
        assert all(m.tangent_gradient_norm(w, p) < 1e-10 for p in pts for w in "HJ")

    def test_not_critical(self):
        p = PhasePoint((1.0, 0.0, 0.0, 0.0, 0.0))
        with pytest.raises(NotCritical):
            SpinOscillator(0.5).classify_singularity(p)


class TestClassify:
    def test_focus_focus_at_half(self):
        c = SpinOscillator(F(1, 2)).classify_singularity(NORTH)
        assert c.kind == "FocusFocus"
        assert sorted(z.real for z in c.eigenvalues) == pytest.approx([-0.5, -0.5, 0.5, 0.5], abs=1e-12)
        assert max(abs(z.imag) for z in c.eigenvalues) < 1e-12

    def test_elliptic_at_zero(self):
        c = SpinOscillator(0).classify_singularity(NORTH)
        assert c.kind == "EllipticElliptic"
        assert sorted(z.imag for z in c.eigenvalues) == pytest.approx([-1, -1, 1, 1], abs=1e-12)

    @pytest.mark.parametrize("t", [F(1, 3), F(1)])
    def test_degenerate(self, t):
        assert SpinOscillator(t).classify_singularity(NORTH).kind == "Degenerate"

    def test_south_pole_always_elliptic(self):
        for t in (0, 0.5, 0.9, 1.2, -0.4):
            assert SpinOscillator(t).classify_singularity(SOUTH).kind == "EllipticElliptic"

    def test_cam_focus_point(self):
        m = CoupledAngularMomenta(0.5, (1, 2))
        kinds = {p.label: m.classify_singularity(p).kind for p in m.critical_points_rank0()}
        assert kinds == {"S-N-": "EllipticElliptic", "S-N+": "EllipticElliptic",
                         "S+N-": "FocusFocus", "S+N+": "EllipticElliptic"}


class TestFocusInterval:
    def test_spin(self):
        ((lo, hi),) = focus_interval(SpinOscillator(0), np.linspace(-0.5, 1.5, 21))
        assert abs(lo - 1 / 3) < 1e-9 and abs(hi - 1) < 1e-9

    def test_below_one_third(self):
        assert focus_interval(SpinOscillator(0), np.linspace(-1, 0.3, 8)) == []

    def test_cam_contains_half(self):
        ((lo, hi),) = focus_interval(CoupledAngularMomenta(0, (1, 2)), np.linspace(0, 1, 11))
        assert lo < 0.5 < hi
        # frozen from a run of the bisection
        assert lo == pytest.approx(0.25547916, abs=1e-6)
        assert hi == pytest.approx(0.92099143, abs=1e-6)


class TestImageBoundary:
    def test_toric_reduction(self):
        # at t = 0, H = N - z = x - 2z on J = x with z in [-1, min(1, x)]
        assert SpinOscillator(0).boundary_at(0) == pytest.approx((0, 2), abs=1e-10)

    def test_symmetry_at_half(self):
        m = SpinOscillator(0.5)
        for x, lo, hi in m.image_boundary([-0.5, 0.2, 1.0, 2.5]):
            assert hi == pytest.approx(-lo, abs=1e-6)

    @pytest.mark.parametrize("t", [0, 0.5, 0.8])
    def test_point_fiber(self, t):
        lo, hi = SpinOscillator(t).boundary_at(-1)
        assert lo == pytest.approx(1 - 2 * t) and hi == pytest.approx(1 - 2 * t)

    def test_continuity_smoke(self):
        m = CoupledAngularMomenta(0.5)
        data = m.image_boundary(np.linspace(-2.9, 2.9, 59))
        for (_, l0, h0), (_, l1, h1) in zip(data, data[1:]):
            assert abs(l1 - l0) < 0.2 and abs(h1 - h0) < 0.2


class TestMeasure:
    def test_theta_measure_against_grid_count(self):
        theta = np.linspace(0, 2 * math.pi, 200001)[:-1]
        for A, B, h in [(0.2, 0.5, 0.4), (0.0, 1.0, -0.99), (1.0, 0.0, 2.0), (0.3, -0.7, 0.1)]:
            direct = 2 * math.pi * np.mean(A + B * np.cos(theta) <= h)
            assert theta_measure(A, B, h) == pytest.approx(direct, abs=1e-4)

    @pytest.mark.parametrize("x", [-0.5, 0, 0.5, 0.9])
    def test_volume_closed_form(self, x):
        assert SpinOscillator(0.5).volume(x) == pytest.approx((x + 1) ** 2 / 2, abs=1e-10)

    def test_monte_carlo_cross_check(self):
        m = SpinOscillator(0.5)
        for h in (math.inf, 0.0):
            mc = m.volume_monte_carlo(0.5, h, samples=400000, seed=11)
            assert mc == pytest.approx(m.volume(0.5, h), abs=2e-2)
        cam = CoupledAngularMomenta(0.5)
        assert cam.volume_monte_carlo(0.0, 0.1, samples=400000, seed=5) == pytest.approx(
            cam.volume(0.0, 0.1), abs=3e-2)

    def test_monte_carlo_seeded(self):
        m = SpinOscillator(0.5)
        assert m.volume_monte_carlo(0.2, seed=3) == m.volume_monte_carlo(0.2, seed=3)

    @pytest.mark.parametrize("x", [-2.5, -0.5, 0.5, 2.0])
    def test_cam_density_equals_slice(self, x):
        m = CoupledAngularMomenta(0.4, (1, 2))
        expected = min(1, x + 2) - max(-1, x - 2)
        assert m.level_density(x, math.inf) == pytest.approx(expected, abs=1e-12)


class TestDevelopingMap:
    def test_bottom_maps_to_zero(self):
        m = SpinOscillator(0.5)
        for x in (-0.5, 0.3, 1.7):
            lo = m.boundary_at(x)[0]
            # the window average picks up O(step) from the moving boundary
            assert m.developing_map(x, lo) == pytest.approx(0, abs=1e-3)
            assert m.developing_map(x, lo, step=1e-5) == pytest.approx(0, abs=1e-5)

    def test_node_height(self):
        assert SpinOscillator(0.5).developing_map(1, 0) == pytest.approx(1, abs=1e-2)

    def test_top_is_cumulative_slice(self):
        m = SpinOscillator(0.5)
        for x in (-0.8, -0.2, 0.4, 0.9):
            assert m.developing_map(x, m.boundary_at(x)[1]) == pytest.approx(x + 1, abs=1e-2)

    def test_node_height_extrapolated(self):
        assert SpinOscillator(0.5).node_height(1, 0) == pytest.approx(1, abs=1e-9)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            SpinOscillator(0.5).developing_map(-1, 0)


class TestPolygonize:
    def test_half_coupling(self):
        m = SpinOscillator(F(1, 2))
        rep = polygonize_report(m, default_grid(m, 41))
        assert rep.semitoric == p_plus()
        assert rep.vertex_error < 1e-2
        assert max(rep.residuals) < 1e-2
        assert rep.unsnapped == []

    def test_toric_coupling(self):
        m = SpinOscillator(0)
        sp = polygonize(m, default_grid(m, 41))
        assert sp.m_f == 0
        assert sp.polygon == p_minus().polygon
        assert rho_J(sp) == rho_J(p_plus())

    def test_rho_j_is_t_independent(self):
        ref = None
        for t in (0, F(1, 2), F(6, 5)):
            m = SpinOscillator(t)
            f = rho_J(polygonize(m, default_grid(m, 31)))
            ref = ref or f
            assert f == ref

    def test_empty_grid(self):
        with pytest.raises(FitFailure):
            polygonize(SpinOscillator(0.5), [])

    def test_sparse_grid(self):
        with pytest.raises(FitFailure):
            polygonize(SpinOscillator(0.5), [0.0, 2.0])

    def test_degenerate_parameter(self):
        with pytest.raises(ValidationFailure):
            polygonize(SpinOscillator(F(1, 3)), default_grid(SpinOscillator(0), 21))

    def test_cam(self):
        m = CoupledAngularMomenta(F(1, 2), (1, 2))
        sp = polygonize(m, default_grid(m, 41))
        assert validate(sp).ok
        assert [(c.x, c.k, c.eps) for c in sp.cuts] == [(-1, 1, 1)]
        assert all(j.measured == j.predicted for j in jumps(sp))
        assert float(sp.cuts[0].y) == pytest.approx(1.15200, abs=1e-4)


def test_snap():
    assert snap(0.33334, 1e-3) == (F(1, 3), True)
    q, ok = snap(math.pi, 1e-6)
    assert not ok and abs(float(q) - math.pi) < 1e-6


def test_make_model():
    assert make_model("spin-oscillator", 0.5).kind == "spin-oscillator"
    assert make_model("coupled-sz", 0.5, (1, 3)).radii == (1.0, 3.0)
    with pytest.raises(ValueError):
        make_model("pendulum", 0.5)
    with pytest.raises(ValueError):
        CoupledAngularMomenta(0.5, (0, 1))
