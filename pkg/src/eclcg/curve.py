"""Short Weierstrass curves ``y^2 = x^3 + A x + B`` and their affine group law.

The same formulas run over a prime field, over a residue ring Z_m with
gcd(m, 6) = 1, and over the rationals.  Over Z_m a denominator that is a
zero divisor raises :class:`AdditionFailure`, which carries a proper factor
of m.  Projective points of E(Z_m) that have no affine representative are
not modelled.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .numtheory import NotInvertible, mod_inv, sqrt_mod_prime

Element = Union[int, Fraction]


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p <= 3:
            raise ValueError(f"prime field needs p > 3, got {self.p}")

    @property
    def modulus(self) -> int:
        return self.p

    def elem(self, x) -> int:
        return _to_residue(x, self.p)

    def inv(self, x: int) -> int:
        return mod_inv(x, self.p)

    def to_json(self) -> dict:
        return {"type": "prime_field", "modulus": str(self.p)}


@dataclass(frozen=True)
class ResidueRing:
    m: int

    def __post_init__(self):
        if self.m < 2 or math.gcd(self.m, 6) != 1:
            raise ValueError(f"residue ring needs m >= 2 with gcd(m, 6) = 1, got {self.m}")

    @property
    def modulus(self) -> int:
        return self.m

    def elem(self, x) -> int:
        return _to_residue(x, self.m)

    def inv(self, x: int) -> int:
        return mod_inv(x, self.m)

    def to_json(self) -> dict:
        return {"type": "residue_ring", "modulus": str(self.m)}


@dataclass(frozen=True)
class Rationals:
    modulus = 0

    def elem(self, x) -> Fraction:
        return Fraction(x)

    def inv(self, x: Fraction) -> Fraction:
        return 1 / Fraction(x)

    def to_json(self) -> dict:
        return {"type": "rationals"}


Ring = Union[PrimeField, ResidueRing, Rationals]


def _to_residue(x, m: int) -> int:
    if isinstance(x, Fraction):
        return x.numerator * mod_inv(x.denominator, m) % m
    return int(x) % m


def ring_from_json(data: dict) -> Ring:
    kind = data["type"]
    if kind == "prime_field":
        return PrimeField(int(data["modulus"]))
    if kind == "residue_ring":
        return ResidueRing(int(data["modulus"]))
    if kind == "rationals":
        return Rationals()
    raise ValueError(f"unknown ring type {kind!r}")


def elem_to_json(x: Element) -> str:
    return str(x)


def elem_from_json(s: str, ring: Ring) -> Element:
    return ring.elem(Fraction(s) if isinstance(ring, Rationals) else int(s))


class AdditionFailure(ArithmeticError):
    """A denominator in the group law shares the factor ``g`` with m."""

    def __init__(self, g: int, modulus: int, context: str):
        super().__init__(f"{context}: denominator shares factor {g} with {modulus}")
        self.g = g
        self.modulus = modulus
        self.context = context


@dataclass(frozen=True)
class Point:
    """Affine point, or the point at infinity when both coordinates are None.

    Build validated points with :meth:`Curve.point`.
    """

    x: Optional[Element] = None
    y: Optional[Element] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_json(self) -> dict:
        if self.is_infinity:
            return {"inf": True}
        return {"x": elem_to_json(self.x), "y": elem_to_json(self.y)}


INFINITY = Point()


def discriminant(A, B, ring: Ring) -> Element:
    A, B = ring.elem(A), ring.elem(B)
    return ring.elem(4 * A ** 3 + 27 * B ** 2)


@dataclass(frozen=True)
class Curve:
    """Curve parameters ``(ring, A, B)`` with a unit discriminant."""

    ring: Ring
    A: Element
    B: Element

    def __post_init__(self):
        object.__setattr__(self, "A", self.ring.elem(self.A))
        object.__setattr__(self, "B", self.ring.elem(self.B))
        d = discriminant(self.A, self.B, self.ring)
        if isinstance(self.ring, Rationals):
            if d == 0:
                raise ValueError("singular curve: zero discriminant")
        elif math.gcd(d, self.ring.modulus) != 1:
            raise ValueError("singular curve: discriminant is not a unit")

    def rhs(self, x: Element) -> Element:
        return self.ring.elem(x ** 3 + self.A * x + self.B)

    def contains(self, P: Point) -> bool:
        if P.is_infinity:
            return True
        return self.ring.elem(P.y ** 2) == self.rhs(P.x)

    def point(self, x, y) -> Point:
        P = Point(self.ring.elem(x), self.ring.elem(y))
        if not self.contains(P):
            raise ValueError(f"({x}, {y}) is not on the curve")
        return P

    def points(self) -> list[Point]:
        """All points over a small prime field, infinity first."""
        if not isinstance(self.ring, PrimeField):
            raise TypeError("enumeration needs a prime field")
        p = self.ring.p
        roots: dict[int, list[int]] = {}
        for y in range(p):
            roots.setdefault(y * y % p, []).append(y)
        pts = [INFINITY]
        for x in range(p):
            for y in roots.get(self.rhs(x), ()):
                pts.append(Point(x, y))
        return pts

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "A": elem_to_json(self.A),
                "B": elem_to_json(self.B)}

    @classmethod
    def from_json(cls, data: dict) -> "Curve":
        ring = ring_from_json(data["ring"])
        return cls(ring, elem_from_json(data["A"], ring), elem_from_json(data["B"], ring))

    def point_from_json(self, data: dict) -> Point:
        if data.get("inf"):
            return INFINITY
        return self.point(elem_from_json(data["x"], self.ring),
                          elem_from_json(data["y"], self.ring))


def negate(P: Point, curve: Curve) -> Point:
    if P.is_infinity:
        return P
    return Point(P.x, curve.ring.elem(-P.y))


def _divide(num, den, curve: Curve, context: str):
    ring = curve.ring
    try:
        return ring.elem(num * ring.inv(den))
    except NotInvertible as exc:
        raise AdditionFailure(exc.g, ring.modulus, context) from None


def add(P: Point, Q: Point, curve: Curve) -> Point:
    """Group law on affine points, raising AdditionFailure over Z_m."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    ring = curve.ring
    if P.x != Q.x:
        s = _divide(Q.y - P.y, Q.x - P.x, curve, "x_Q - x_P")
        x = ring.elem(s * s - P.x - Q.x)
    else:
        if P.y != Q.y:
            # same x, different y: fine only if Q = -P everywhere
            if ring.elem(P.y + Q.y) == 0:
                return INFINITY
            raise AdditionFailure(math.gcd(ring.elem(P.y + Q.y), ring.modulus),
                                  ring.modulus, "y_P + y_Q")
        if ring.elem(P.y) == 0:
            return INFINITY
        s = _divide(3 * P.x * P.x + curve.A, 2 * P.y, curve, "2 y_P")
        x = ring.elem(s * s - 2 * P.x)
    return Point(x, ring.elem(s * (P.x - x) - P.y))


def sub(P: Point, Q: Point, curve: Curve) -> Point:
    return add(P, negate(Q, curve), curve)


def scalar_mul(n: int, P: Point, curve: Curve) -> Point:
    """``n * P`` by double-and-add, n >= 0."""
    if n < 0:
        raise ValueError("scalar must be nonnegative")
    R = INFINITY
    while n:
        if n & 1:
            R = add(R, P, curve)
        n >>= 1
        if n:
            P = add(P, P, curve)
    return R


def reduce_point(P: Point, modulus: int) -> Point:
    """Coordinate-wise image of a rational or Z_m point modulo ``modulus``.

    A rational coordinate whose denominator is not invertible raises
    :class:`NotInvertible`.
    """
    if P.is_infinity:
        return P
    return Point(_to_residue(P.x, modulus), _to_residue(P.y, modulus))


def random_point(curve: Curve, rng: random.Random) -> Point:
    """Random affine point over a prime field, uniform up to the sign of y."""
    if not isinstance(curve.ring, PrimeField):
        raise TypeError("random_point needs a prime field")
    p = curve.ring.p
    while True:
        x = rng.randrange(p)
        y = sqrt_mod_prime(curve.rhs(x), p)
        if y is None:
            continue
        if rng.getrandbits(1):
            y = -y % p
        return Point(x, y)
