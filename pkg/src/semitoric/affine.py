"""Exact rationals and the integral-affine algebra of the plane.

Everything here is exact: coordinates are :class:`fractions.Fraction`, matrices
are integer.  Infinite interval ends are represented by ``math.inf`` floats,
which compare correctly against fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction
ExtendedRational = Union[Fraction, float]

INF = math.inf
NEG_INF = -math.inf


def as_rational(value) -> Fraction:
    """Coerce ints, fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected on purpose: polygon data must never pass through
    binary floating point.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def as_extended(value) -> ExtendedRational:
    if isinstance(value, float) and math.isinf(value):
        return value
    if isinstance(value, str) and value.strip() in ("inf", "+inf", "-inf"):
        return INF if not value.strip().startswith("-") else NEG_INF
    return as_rational(value)


def is_finite(value: ExtendedRational) -> bool:
    return not (isinstance(value, float) and math.isinf(value))


def format_rational(value: ExtendedRational) -> str:
    """``"p/q"``, or ``"p"`` when q == 1; infinities as ``"inf"``/``"-inf"``."""
    if not is_finite(value):
        return "inf" if value > 0 else "-inf"
    value = as_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Point2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", as_rational(self.x))
        object.__setattr__(self, "y", as_rational(self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __str__(self):
        return f"({format_rational(self.x)}, {format_rational(self.y)})"


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer 2x2 matrix ``[[a, b], [c, d]]`` with determinant +-1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            if not isinstance(getattr(self, name), int):
                raise TypeError(f"matrix entry {name} must be an integer")
        if abs(self.det) != 1:
            raise ValueError(f"determinant {self.det} is not +-1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def monodromy(cls, k: int) -> "UnimodularMatrix":
        """The shear ``T^k = [[1, 0], [k, 1]]`` fixing the vertical axis."""
        return cls(1, 0, k, 1)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        s = self.det
        return UnimodularMatrix(s * self.d, -s * self.b, -s * self.c, s * self.a)

    def apply(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return self.a * x + self.b * y, self.c * x + self.d * y


@dataclass(frozen=True)
class IntegralAffineMap:
    """An element ``p -> linear @ p + translation`` of Aff(2, Z)."""

    linear: UnimodularMatrix
    translation: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def __post_init__(self):
        tx, ty = self.translation
        object.__setattr__(self, "translation", (as_rational(tx), as_rational(ty)))

    @classmethod
    def identity(cls) -> "IntegralAffineMap":
        return cls(UnimodularMatrix.identity())

    @classmethod
    def monodromy(cls, k: int) -> "IntegralAffineMap":
        return cls(UnimodularMatrix.monodromy(k))

    def __call__(self, p: Point2) -> Point2:
        return apply_affine(self, p)

    def compose(self, other: "IntegralAffineMap") -> "IntegralAffineMap":
        """``self o other``: apply ``other`` first."""
        tx, ty = self.linear.apply(*other.translation)
        return IntegralAffineMap(
            self.linear @ other.linear,
            (tx + self.translation[0], ty + self.translation[1]),
        )

    def inverse(self) -> "IntegralAffineMap":
        inv = self.linear.inverse()
        tx, ty = inv.apply(*self.translation)
        return IntegralAffineMap(inv, (-tx, -ty))


def apply_affine(amap: IntegralAffineMap, p: Point2) -> Point2:
    x, y = amap.linear.apply(p.x, p.y)
    return Point2(x + amap.translation[0], y + amap.translation[1])


@dataclass(frozen=True)
class VerticalShear:
    """Identity left of ``x = line_x``, the shear ``T^exponent`` to the right.

    The affine origin is anchored at ``(line_x, 0)``; any anchor on the line
    gives the same map.
    """

    line_x: Fraction
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "line_x", as_rational(self.line_x))
        if not isinstance(self.exponent, int):
            raise TypeError("shear exponent must be an integer")

    def offset(self, x: Fraction) -> Fraction:
        """Vertical displacement applied at abscissa ``x``."""
        if x <= self.line_x:
            return Fraction(0)
        return self.exponent * (x - self.line_x)

    def __call__(self, p: Point2) -> Point2:
        return apply_vertical_shear(self, p)

    def inverse(self) -> "VerticalShear":
        return VerticalShear(self.line_x, -self.exponent)


def apply_vertical_shear(shear: VerticalShear, p: Point2) -> Point2:
    return Point2(p.x, p.y + shear.offset(p.x))


def apply_multi_shear(shears: Iterable[VerticalShear], p: Point2) -> Point2:
    # Every shear keeps x fixed, so the offsets simply add up; order is irrelevant.
    return Point2(p.x, p.y + sum((s.offset(p.x) for s in shears), Fraction(0)))


@dataclass(frozen=True)
class TElement:
    """Element of the group fixing vertical lines: ``(x, y) -> (x, y + k x + c)``."""

    shear_k: int = 0
    vertical_offset: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.shear_k, int):
            raise TypeError("shear_k must be an integer")
        object.__setattr__(self, "vertical_offset", as_rational(self.vertical_offset))

    def __call__(self, p: Point2) -> Point2:
        return Point2(p.x, p.y + self.shear_k * p.x + self.vertical_offset)

    def compose(self, other: "TElement") -> "TElement":
        return compose_t(self, other)

    def inverse(self) -> "TElement":
        return TElement(-self.shear_k, -self.vertical_offset)

    def to_affine(self) -> IntegralAffineMap:
        return IntegralAffineMap(
            UnimodularMatrix.monodromy(self.shear_k), (Fraction(0), self.vertical_offset)
        )


def compose_t(a: TElement, b: TElement) -> TElement:
    """``a o b`` (act with ``b`` first).  The group is Abelian."""
    return TElement(a.shear_k + b.shear_k, a.vertical_offset + b.vertical_offset)


def primitive_vector(dx: int, slope: Fraction) -> tuple[int, int]:
    """Primitive integer vector pointing along ``(dx, dx * slope)`` with ``dx = +-1``."""
    slope = as_rational(slope)
    sign = 1 if dx > 0 else -1
    return sign * slope.denominator, sign * slope.numerator
