"""The two example integrable systems and a numeric developing map.

Both models are written with respect to two commuting actions ``(p, q)``
whose sum is ``J``; after averaging out the common angle the residual
dependence of ``H`` on the relative angle ``theta`` is ``A(p, q) + B(p, q) cos
theta``.  Liouville measure is flat in ``(p, phi, q, psi)``, which turns the
volume of ``{J <= x, H <= h}`` into a two-dimensional integral with a closed
form in ``theta``.

Linearisations are computed in ambient Poisson coordinates (unit sphere or
sphere of radius ``R`` with the angular-momentum bracket, plane with the
canonical bracket) at high precision with mpmath.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

from .cuts import Cut, SemitoricPolygon, validate
from .affine import Point2
from .polygon import PiecewiseLinear, Polygon, PolygonError, corner_weights

DEGENERACY_THRESHOLD = 1e-8
GRADIENT_TOLERANCE = 1e-10
DEFAULT_STEP = 1e-3
SNAP_DENOMINATOR = 32
# node ordinates are not structurally rational; they only need an exact stand-in
NODE_DENOMINATOR = 10 ** 4

# generic coefficient for the pencil H + c J (kept away from small rationals)
_PENCIL_C = mpmath.mpf("0.7548776662466927600495088963585286918946")
_DPS = 50

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


class SystemError_(ValueError):
    pass


class InvalidPoint(SystemError_):
    pass


class NotCritical(SystemError_):
    pass


class EmptyLevelSet(SystemError_):
    pass


class OutOfRange(SystemError_):
    pass


class FitFailure(SystemError_):
    pass


class ValidationFailure(SystemError_):
    pass


@dataclass(frozen=True)
class PhasePoint:
    coords: tuple[float, ...]
    label: str = ""

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class SingularityClass:
    kind: str  # "EllipticElliptic" | "FocusFocus" | "Degenerate"
    eigenvalues: tuple[complex, ...]
    pencil_eigenvalues: tuple[complex, ...] = ()


@dataclass(frozen=True)
class _Quadratic:
    """``f(w) = 1/2 w.Q.w + l.w``, exact enough for both models."""

    Q: tuple[tuple[float, ...], ...]
    l: tuple[float, ...]

    def value(self, w):
        Q, l = np.array(self.Q, dtype=float), np.array(self.l, dtype=float).ravel()
        w = np.asarray(w, dtype=float)
        return 0.5 * w @ Q @ w + l @ w

    def mp_grad(self, w):
        Q, l = mpmath.matrix(self.Q), mpmath.matrix(self.l)
        return Q * w + l


def _exact(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def _zeros(n, mp):
    return mpmath.zeros(n, n) if mp else np.zeros((n, n))


def _freeze(Q, l, n):
    return _Quadratic(tuple(tuple(Q[i, j] for j in range(n)) for i in range(n)),
                      tuple(l[i] for i in range(n)))


def _cross_matrix(a):
    return mpmath.matrix([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])


class SystemModel:
    """Common machinery; subclasses define the quadratic forms and reduction."""

    kind: str = ""
    # blocks: ("sphere", radius, start) or ("plane", start)
    blocks: tuple = ()
    dim: int = 0

    def __init__(self, t):
        # keep t exact so that critical parameters such as 1/3 reach mpmath unrounded
        self.t_exact = _exact(t)
        self.t = float(self.t_exact)

    def _num(self, value, mp: bool):
        value = _exact(value)
        return mpmath.mpf(value.numerator) / value.denominator if mp else float(value)

    # --- ambient description -------------------------------------------

    def J_form(self, mp: bool = False) -> _Quadratic:
        raise NotImplementedError

    def H_form(self, mp: bool = False) -> _Quadratic:
        raise NotImplementedError

    def check_point(self, p: PhasePoint):
        w = p.coords
        if len(w) != self.dim:
            raise InvalidPoint(f"{self.kind} points have {self.dim} coordinates, got {len(w)}")
        for block in self.blocks:
            if block[0] == "sphere":
                r, s = block[1], block[2]
                norm2 = sum(c * c for c in w[s:s + 3])
                if abs(norm2 - r * r) > 1e-12 * max(1.0, r * r):
                    raise InvalidPoint(f"point is off the sphere of radius {r}")

    def eval_moment(self, p: PhasePoint) -> tuple[float, float]:
        self.check_point(p)
        return float(self.J_form().value(p.coords)), float(self.H_form().value(p.coords))

    def _mp_linearisation(self, form: _Quadratic, w) -> mpmath.matrix:
        Q = mpmath.matrix(form.Q)
        g = form.mp_grad(w)
        D = mpmath.matrix(self.dim, self.dim)
        for block in self.blocks:
            if block[0] == "sphere":
                s = block[2]
                r = [w[s + i] for i in range(3)]
                gs = [g[s + i] for i in range(3)]
                rows = mpmath.matrix(3, self.dim)
                for i in range(3):
                    for j in range(self.dim):
                        rows[i, j] = Q[s + i, j]
                part = -_cross_matrix(r) * rows
                gx = _cross_matrix(gs)
                for i in range(3):
                    for j in range(3):
                        part[i, s + j] += gx[i, j]
                for i in range(3):
                    for j in range(self.dim):
                        D[s + i, j] = part[i, j]
            else:
                s = block[1]
                for j in range(self.dim):
                    D[s, j] = -Q[s + 1, j]
                    D[s + 1, j] = Q[s, j]
        return D

    def _tangent_basis(self, w) -> mpmath.matrix:
        cols = []
        for block in self.blocks:
            if block[0] == "sphere":
                s = block[2]
                r = mpmath.matrix([w[s + i] for i in range(3)])
                r = r / mpmath.norm(r)
                trial = [mpmath.matrix([1, 0, 0]), mpmath.matrix([0, 1, 0]), mpmath.matrix([0, 0, 1])]
                basis = []
                for v in trial:
                    v = v - (v.T * r)[0] * r
                    for b in basis:
                        v = v - (v.T * b)[0] * b
                    if mpmath.norm(v) > mpmath.mpf("0.1"):
                        basis.append(v / mpmath.norm(v))
                    if len(basis) == 2:
                        break
                for b in basis:
                    col = mpmath.matrix(self.dim, 1)
                    for i in range(3):
                        col[s + i] = b[i]
                    cols.append(col)
            else:
                s = block[1]
                for i in range(2):
                    col = mpmath.matrix(self.dim, 1)
                    col[s + i] = 1
                    cols.append(col)
        E = mpmath.matrix(self.dim, len(cols))
        for j, c in enumerate(cols):
            for i in range(self.dim):
                E[i, j] = c[i]
        return E

    def _is_rank0(self, p: PhasePoint) -> bool:
        return max(self.tangent_gradient_norm("H", p),
                   self.tangent_gradient_norm("J", p)) < GRADIENT_TOLERANCE

    def tangent_gradient_norm(self, which: str, p: PhasePoint) -> float:
        with mpmath.workdps(_DPS):
            form = self.H_form(mp=True) if which == "H" else self.J_form(mp=True)
            w = mpmath.matrix([mpmath.mpf(c) for c in p.coords])
            g = form.mp_grad(w)
            E = self._tangent_basis(w)
            return float(mpmath.norm(E.T * g))

    # --- rank-zero points ----------------------------------------------

    def pole_candidates(self) -> list[PhasePoint]:
        raise NotImplementedError

    def critical_points_rank0(self) -> list[PhasePoint]:
        out = []
        for p in self.pole_candidates():
            if self._is_rank0(p):
                out.append(p)
        return out

    def classify_singularity(self, p: PhasePoint) -> SingularityClass:
        self.check_point(p)
        if not self._is_rank0(p):
            raise NotCritical(f"{p.label or p.coords} is not a rank-zero point")
        with mpmath.workdps(_DPS):
            w = mpmath.matrix([mpmath.mpf(c) for c in p.coords])
            E = self._tangent_basis(w)
            A_H = E.T * self._mp_linearisation(self.H_form(mp=True), w) * E
            A_J = E.T * self._mp_linearisation(self.J_form(mp=True), w) * E
            spec_H = [complex(z) for z in mpmath.eig(A_H, left=False, right=False)]
            pencil = [complex(z) for z in mpmath.eig(A_H + _PENCIL_C * A_J, left=False, right=False)]
        spec_H.sort(key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        pencil.sort(key=lambda z: (round(z.real, 12), round(z.imag, 12)))
        gaps = [abs(a - b) for i, a in enumerate(pencil) for b in pencil[i + 1:]]
        if min(abs(z) for z in pencil) < DEGENERACY_THRESHOLD or min(gaps) < DEGENERACY_THRESHOLD:
            kind = "Degenerate"
        elif all(abs(z.real) < DEGENERACY_THRESHOLD for z in pencil):
            kind = "EllipticElliptic"
        elif all(abs(z.real) >= DEGENERACY_THRESHOLD and abs(z.imag) >= DEGENERACY_THRESHOLD
                 for z in pencil):
            kind = "FocusFocus"
        else:
            kind = "Degenerate"  # mixed real/imaginary blocks do not occur in these models
        return SingularityClass(kind, tuple(spec_H), tuple(pencil))

    # --- reduced description ---------------------------------------------

    @property
    def j_range(self) -> tuple[float, float]:
        raise NotImplementedError

    def p_range(self, x: float) -> tuple[float, float]:
        """Range of the first action ``p`` on the level set ``J = x``."""
        raise NotImplementedError

    def reduced(self, p, q):
        """``(A, B)`` with ``H = A + B cos(theta)`` at actions ``(p, q)``."""
        raise NotImplementedError

    def _reduced_on_level(self, x, p):
        return self.reduced(p, x - p)

    def image_boundary(self, x_grid, samples: int = 2001) -> list[tuple[float, float, float]]:
        return [(float(x), *self.boundary_at(x, samples)) for x in x_grid]

    def boundary_at(self, x: float, samples: int = 2001) -> tuple[float, float]:
        lo, hi = self.p_range(x)
        if lo > hi + 1e-14:
            raise EmptyLevelSet(f"J = {x} is outside the image")
        if hi - lo < 1e-14:
            A, B = self._reduced_on_level(x, np.array([lo]))
            return float(A[0] - abs(B[0])), float(A[0] + abs(B[0]))

        def h_min(p):
            A, B = self._reduced_on_level(x, np.atleast_1d(p))
            return float((A - np.abs(B))[0])

        def h_max(p):
            A, B = self._reduced_on_level(x, np.atleast_1d(p))
            return float(-(A + np.abs(B))[0])

        ps = np.linspace(lo, hi, samples)
        A, B = self._reduced_on_level(x, ps)
        out = []
        for vals, fn in ((A - np.abs(B), h_min), (-(A + np.abs(B)), h_max)):
            i = int(np.argmin(vals))
            a, b = ps[max(i - 1, 0)], ps[min(i + 1, samples - 1)]
            best = vals[i]
            if b > a:
                res = minimize_scalar(fn, bounds=(a, b), method="bounded",
                                      options={"xatol": 1e-13})
                best = min(best, res.fun)
            out.append(float(best))
        return out[0], -out[1]

    def level_density(self, s: float, h: float, nodes: int = 400) -> float:
        """``(2 pi)^-1`` times the Liouville measure of ``{H <= h}`` on ``J = s``.

        Normalised per unit ``|ds|`` and per ``(2 pi)^2``, so that it equals the
        vertical slice length of the polygon when ``h`` exceeds ``H+``.
        """
        lo, hi = self.p_range(s)
        if not (hi > lo):
            return 0.0
        xg, wg = _gauss(nodes)
        ps = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        A, B = self._reduced_on_level(s, ps)
        m = theta_measure(A, B, h)
        return float(0.5 * (hi - lo) * (wg @ m) / (2 * math.pi))

    def developing_map(self, x: float, h: float, step: float = DEFAULT_STEP,
                       nodes: int = 400, window_nodes: int = 12) -> float:
        """Second action variable ``d/dx [(2 pi)^-2 vol{J <= x, H <= h}]``.

        The central difference ``(V(x + d) - V(x - d)) / 2d`` is evaluated as
        the exact window average of the level density, with ``d`` shrunk near
        the ends of the image.
        """
        jmin, jmax = self.j_range
        if not (jmin < x < jmax):
            raise OutOfRange(f"x = {x} is not in the interior of J(M)")
        d = min(step, (x - jmin) / 2, (jmax - x) / 2)
        xg, wg = _gauss(window_nodes)
        ss = x + d * xg
        vals = np.array([self.level_density(s, h, nodes) for s in ss])
        return float(0.5 * (wg @ vals))

    def node_height(self, x: float, h: float, step: float = DEFAULT_STEP, nodes: int = 400) -> float:
        """:meth:`developing_map` at a focus-focus value.

        The density has a kink across the node abscissa, so the window average
        is only first-order there; one Richardson step removes the linear term.
        """
        return 2 * self.developing_map(x, h, step / 2, nodes) - self.developing_map(x, h, step, nodes)

    def volume(self, x: float, h: float = math.inf, nodes: int = 400) -> float:
        """``(2 pi)^-2`` times the Liouville volume of ``{J <= x, H <= h}``."""
        jmin, _ = self.j_range
        if x <= jmin:
            return 0.0
        marks = sorted({jmin, x} | {v for v in self.rank0_abscissae() if jmin < v < x})
        xg, wg = _gauss(64)
        total = 0.0
        for a, b in zip(marks, marks[1:]):
            ss = 0.5 * (b - a) * xg + 0.5 * (b + a)
            vals = np.array([self.level_density(s, h, nodes) for s in ss])
            total += 0.5 * (b - a) * (wg @ vals)
        return float(total)

    def volume_monte_carlo(self, x: float, h: float = math.inf, samples: int = 200000,
                           seed: int = 0) -> float:
        """Seeded Monte Carlo estimate of :meth:`volume` in flat coordinates."""
        raise NotImplementedError

    def rank0_abscissae(self) -> list[float]:
        return sorted({self.eval_moment(p)[0] for p in self.pole_candidates()})


def theta_measure(A, B, h):
    """Measure of ``{theta in [0, 2 pi) : A + B cos(theta) <= h}``."""
    A, B = np.asarray(A, dtype=float), np.abs(np.asarray(B, dtype=float))
    out = np.where(A <= h, 2 * math.pi, 0.0)
    pos = B > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.clip((h - A) / np.where(pos, B, 1.0), -1.0, 1.0)
    return np.where(pos, 2 * (math.pi - np.arccos(c)), out)


class SpinOscillator(SystemModel):
    """``J = N + z``, ``H_t = (1 - 2t)(N - z) + t (u x + v y)`` on the sphere times the plane."""

    kind = "spin-oscillator"
    blocks = (("sphere", 1.0, 0), ("plane", 3))
    dim = 5

    def J_form(self, mp=False):
        Q, l = _zeros(5, mp), [0] * 5
        Q[3, 3] = Q[4, 4] = 1
        l[2] = 1
        return _freeze(Q, l, 5)

    def H_form(self, mp=False):
        t = self._num(self.t_exact, mp)
        Q, l = _zeros(5, mp), [0] * 5
        Q[3, 3] = Q[4, 4] = 1 - 2 * t
        Q[0, 3] = Q[3, 0] = Q[1, 4] = Q[4, 1] = t
        l[2] = -(1 - 2 * t)
        return _freeze(Q, l, 5)

    def pole_candidates(self):
        return [PhasePoint((0.0, 0.0, -1.0, 0.0, 0.0), "A"),
                PhasePoint((0.0, 0.0, 1.0, 0.0, 0.0), "B")]

    @property
    def j_range(self):
        return -1.0, math.inf

    def p_range(self, x):
        return -1.0, min(1.0, x)

    def reduced(self, z, n):
        z, n = np.asarray(z, dtype=float), np.asarray(n, dtype=float)
        A = (1 - 2 * self.t) * (n - z)
        B = self.t * np.sqrt(np.clip(1 - z * z, 0, None)) * np.sqrt(np.clip(2 * n, 0, None))
        return A, B

    def volume_monte_carlo(self, x, h=math.inf, samples=200000, seed=0):
        # sample (z, phi, N, psi) on the box [-1, 1] x [0, 2pi) x [0, x + 1] x [0, 2pi)
        rng = np.random.default_rng(seed)
        n_max = max(x + 1.0, 0.0)
        z = rng.uniform(-1, 1, samples)
        n = rng.uniform(0, n_max, samples)
        theta = rng.uniform(0, 2 * math.pi, samples)
        A, B = self.reduced(z, n)
        inside = (z + n <= x) & (A + B * np.cos(theta) <= h)
        box = 2 * n_max * (2 * math.pi) ** 2
        return float(box * inside.mean() / (2 * math.pi) ** 2)


class CoupledAngularMomenta(SystemModel):
    """``J = S_z + N_z``, ``H_t = (1 - t) S_z / |S| + t <N, S> / (|N| |S|)``."""

    kind = "coupled-sz"
    dim = 6

    def __init__(self, t, radii=(1, 2)):
        super().__init__(t)
        exact = tuple(_exact(r) for r in radii)
        if len(exact) != 2 or min(exact) <= 0:
            raise ValueError("radii must be two positive numbers")
        self.radii_exact = exact
        self.radii = tuple(float(r) for r in exact)
        self.blocks = (("sphere", self.radii[0], 0), ("sphere", self.radii[1], 3))

    def J_form(self, mp=False):
        l = [0] * 6
        l[2] = l[5] = 1
        return _freeze(_zeros(6, mp), l, 6)

    def H_form(self, mp=False):
        s, n = (self._num(r, mp) for r in self.radii_exact)
        t = self._num(self.t_exact, mp)
        Q, l = _zeros(6, mp), [0] * 6
        for i in range(3):
            Q[i, 3 + i] = Q[3 + i, i] = t / (n * s)
        l[2] = (1 - t) / s
        return _freeze(Q, l, 6)

    def pole_candidates(self):
        s, n = self.radii
        out = []
        for a in (-1, 1):
            for b in (-1, 1):
                label = f"S{'+' if a > 0 else '-'}N{'+' if b > 0 else '-'}"
                out.append(PhasePoint((0.0, 0.0, a * s, 0.0, 0.0, b * n), label))
        return out

    @property
    def j_range(self):
        s, n = self.radii
        return -(s + n), s + n

    def p_range(self, x):
        s, n = self.radii
        return max(-s, x - n), min(s, x + n)

    def reduced(self, sz, nz):
        s, n = self.radii
        t = self.t
        sz, nz = np.asarray(sz, dtype=float), np.asarray(nz, dtype=float)
        A = (1 - t) / s * sz + t / (n * s) * sz * nz
        B = t / (n * s) * np.sqrt(np.clip(s * s - sz * sz, 0, None)) * np.sqrt(
            np.clip(n * n - nz * nz, 0, None))
        return A, B

    def volume_monte_carlo(self, x, h=math.inf, samples=200000, seed=0):
        rng = np.random.default_rng(seed)
        s, n = self.radii
        sz = rng.uniform(-s, s, samples)
        nz = rng.uniform(-n, n, samples)
        theta = rng.uniform(0, 2 * math.pi, samples)
        A, B = self.reduced(sz, nz)
        inside = (sz + nz <= x) & (A + B * np.cos(theta) <= h)
        box = 4 * s * n * (2 * math.pi) ** 2
        return float(box * inside.mean() / (2 * math.pi) ** 2)


def make_model(kind: str, t: float, radii: Optional[Sequence[float]] = None) -> SystemModel:
    if kind in ("spin-oscillator", "spin"):
        return SpinOscillator(t)
    if kind in ("coupled-sz", "coupled-angular-momenta", "cam"):
        return CoupledAngularMomenta(t, tuple(radii) if radii else (1.0, 2.0))
    raise ValueError(f"unknown model {kind!r}")


def _with_t(model: SystemModel, t: float) -> SystemModel:
    if isinstance(model, CoupledAngularMomenta):
        return CoupledAngularMomenta(t, model.radii_exact)
    return type(model)(t)


def has_focus_focus(model: SystemModel) -> bool:
    return any(model.classify_singularity(p).kind == "FocusFocus"
               for p in model.critical_points_rank0())


def focus_interval(model: SystemModel, t_grid: Sequence[float], tol: float = 1e-9
                   ) -> list[tuple[float, float]]:
    """Maximal t-intervals (within the grid span) on which a focus-focus point exists."""
    ts = sorted(float(t) for t in t_grid)
    if not ts:
        return []
    flags = [has_focus_focus(_with_t(model, t)) for t in ts]

    def boundary(outside, inside):
        while abs(inside - outside) > tol:
            m = 0.5 * (outside + inside)
            if has_focus_focus(_with_t(model, m)):
                inside = m
            else:
                outside = m
        return 0.5 * (outside + inside)

    intervals = []
    i = 0
    while i < len(ts):
        if not flags[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(ts) and flags[j + 1]:
            j += 1
        lo = ts[i] if i == 0 else boundary(ts[i - 1], ts[i])
        hi = ts[j] if j == len(ts) - 1 else boundary(ts[j + 1], ts[j])
        intervals.append((lo, hi))
        i = j + 1
    return intervals


# --- polygonisation -------------------------------------------------------


def snap(value: float, tol: float, max_denominator: int = SNAP_DENOMINATOR) -> tuple[Fraction, bool]:
    """Best rational approximation with bounded denominator, if within ``5 tol``."""
    q = Fraction(value).limit_denominator(max_denominator)
    if abs(float(q) - value) <= 5 * tol:
        return q, True
    return Fraction(value).limit_denominator(10 ** 6), False


@dataclass
class RankZeroPoint:
    point: PhasePoint
    x: float
    h: float
    kind: str
    position: str  # "end", "top", "bottom", "interior"


@dataclass
class Polygonization:
    semitoric: SemitoricPolygon
    raw_vertices: list[tuple[float, float]]
    snapped_vertices: list[tuple[Fraction, Fraction]]
    vertex_error: float
    residuals: list[float]
    unsnapped: list[str] = field(default_factory=list)
    rank0: list[RankZeroPoint] = field(default_factory=list)
    samples: list[tuple[float, float]] = field(default_factory=list)


def rank0_data(model: SystemModel, tol: float = 1e-6) -> list[RankZeroPoint]:
    jmin, jmax = model.j_range
    out = []
    for p in model.critical_points_rank0():
        cls = model.classify_singularity(p)
        x, h = model.eval_moment(p)
        if abs(x - jmin) < tol or abs(x - jmax) < tol:
            pos = "end"
        else:
            lo, hi = model.boundary_at(x)
            if abs(h - hi) < tol:
                pos = "top"
            elif abs(h - lo) < tol:
                pos = "bottom"
            else:
                pos = "interior"
        out.append(RankZeroPoint(p, x, h, cls.kind, pos))
    return out


def default_grid(model: SystemModel, n: int = 41, x_max: float = 3.0) -> list[float]:
    jmin, jmax = model.j_range
    hi = jmax if math.isfinite(jmax) else x_max
    return list(np.linspace(jmin, hi, n + 2)[1:-1])


def polygonize_report(model: SystemModel, x_grid: Sequence[float], tol: float = 1e-2,
                      step: float = DEFAULT_STEP, nodes: int = 400) -> Polygonization:
    xs = sorted(float(x) for x in x_grid)
    if not xs:
        raise FitFailure("empty x grid")
    jmin, jmax = model.j_range
    rank0 = rank0_data(model)
    bad = [r for r in rank0 if r.kind == "Degenerate"]
    if bad:
        raise ValidationFailure(f"degenerate singularity at J = {bad[0].x:.12g}: not semi-toric")

    unsnapped: list[str] = []

    def snapped(v, what):
        q, ok = snap(v, tol)
        if not ok:
            unsnapped.append(f"{what} = {v:.12g}")
        return q

    interior = sorted({r.x for r in rank0 if jmin + 1e-9 < r.x < jmax - 1e-9})
    bounds = [jmin] + interior + [jmax]

    # fit G(x) = f2(x, H+(x)) on every cell
    samples, lines, residuals = [], [], []
    margin = 2 * step
    for c0, c1 in zip(bounds, bounds[1:]):
        cell_x = [x for x in xs if c0 + margin < x < c1 - margin]
        if len(cell_x) < 2:
            raise FitFailure(f"fewer than two samples in the cell ({c0:.12g}, {c1:.12g})")
        g = [model.developing_map(x, model.boundary_at(x)[1], step, nodes) for x in cell_x]
        samples.extend(zip(cell_x, g))
        slope, icpt = np.polyfit(cell_x, g, 1)
        res = float(np.max(np.abs(np.polyval([slope, icpt], cell_x) - np.array(g))))
        residuals.append(res)
        if res >= tol:
            raise FitFailure(f"residual {res:.3g} on ({c0:.12g}, {c1:.12g}) exceeds tol {tol}")
        lines.append((float(slope), float(icpt)))

    raw = [(jmin, lines[0][0] * jmin + lines[0][1])]
    for (s0, i0), (s1, i1) in zip(lines, lines[1:]):
        if abs(s0 - s1) < 1e-12:
            raise FitFailure("adjacent cells have parallel fits; vertex is not resolved")
        xv = (i1 - i0) / (s0 - s1)
        raw.append((xv, s0 * xv + i0))
    if math.isfinite(jmax):
        raw.append((jmax, lines[-1][0] * jmax + lines[-1][1]))

    bps = [snapped(jmin, "J_min")] + [snapped(x, "vertex abscissa") for x in interior]
    vals = [snapped(y, "boundary value") for _, y in raw[:len(bps)]]
    if math.isfinite(jmax):
        bps.append(snapped(jmax, "J_max"))
        vals.append(snapped(raw[-1][1], "boundary value"))
        G = PiecewiseLinear(tuple(bps), tuple(vals))
    else:
        G = PiecewiseLinear(tuple(bps), tuple(vals), right_slope=snapped(lines[-1][0], "ray slope"))
    zero = PiecewiseLinear(G.breakpoints, (Fraction(0),) * len(G.breakpoints),
                           right_slope=None if G.right_slope is None else Fraction(0))

    # glue across interior elliptic vertices of the bottom boundary
    offset = zero
    top_x = {snapped(r.x, "vertex abscissa") for r in rank0 if r.position == "top"}
    for r in rank0:
        if r.position != "bottom" or r.kind != "EllipticElliptic":
            continue
        xb = snapped(r.x, "vertex abscissa")
        dG = G.slope_right(xb) - G.slope_left(xb)
        if xb in top_x:
            delta = _shared_germ_correction(G, offset, xb)
        else:
            delta = -dG
        if delta.denominator != 1:
            raise FitFailure(f"non-integral bottom correction {delta} at x = {xb}")
        offset = offset + PiecewiseLinear.ramp(xb, int(delta))

    try:
        poly = Polygon(offset, G + offset)
    except PolygonError as exc:
        raise ValidationFailure(f"reconstructed polygon is invalid: {exc}") from exc

    ff = [r for r in rank0 if r.kind == "FocusFocus"]
    counts = Counter((round(r.x, 9), round(r.h, 9)) for r in ff)
    cuts = []
    for key, k in sorted(counts.items()):
        xc, hc = key
        yc = model.node_height(xc, hc, step, nodes)
        xq = snapped(xc, "node abscissa")
        yq = Fraction(yc).limit_denominator(NODE_DENOMINATOR) + offset(xq)
        cuts.append(Cut(Point2(xq, yq), k, 1))
    sp = SemitoricPolygon(poly, tuple(cuts))
    report = validate(sp)
    if not report.ok:
        raise ValidationFailure("; ".join(i.message for i in report.issues))

    snapped_vertices = [(x, poly.top(x)) for x in G.breakpoints]
    raw_pts = raw[:len(snapped_vertices)]
    # raw vertices live on the uncorrected chain G
    err = max(math.hypot(float(x) - rx, float(G(x)) - ry)
              for (x, _), (rx, ry) in zip(snapped_vertices, raw_pts))
    return Polygonization(sp, raw_pts, snapped_vertices, err, residuals, unsnapped, rank0, samples)


def _shared_germ_correction(G: PiecewiseLinear, offset: PiecewiseLinear, xb: Fraction) -> Fraction:
    """Smallest bottom bend making both corners over ``xb`` unimodular."""
    for delta in range(1, 9):
        trial = offset + PiecewiseLinear.ramp(xb, delta)
        try:
            poly = Polygon(trial, G + trial)
        except PolygonError:
            continue
        if all(corner_weights(poly, v).unimodular for v in poly.vertices() if v.x == xb):
            return Fraction(delta)
    raise FitFailure(f"no integral bottom correction fits the shared vertex at x = {xb}")


def polygonize(model: SystemModel, x_grid: Sequence[float], tol: float = 1e-2,
               step: float = DEFAULT_STEP, nodes: int = 400) -> SemitoricPolygon:
    """Numeric developing-map reconstruction of the polygon with all cuts upward."""
    return polygonize_report(model, x_grid, tol, step, nodes).semitoric
