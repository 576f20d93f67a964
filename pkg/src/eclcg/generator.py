"""The elliptic curve congruential generator and its x-only recurrence.

The generator walks ``W_n = W_{n-1} + G`` and outputs ``x(W_n)``.  Knowing
only x-coordinates, consecutive outputs still satisfy

    x_{n+1} = 2 (x_n^3 + A x_n + B + y_G^2) / (x_n - x_G)^2
              - 2 (x_n + x_G) - x_{n-1}

which :func:`predict_next` evaluates over any supported ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .curve import (INFINITY, Curve, Element, Point, PrimeField, Rationals,
                    Ring, ResidueRing, add, elem_from_json, elem_to_json,
                    negate, ring_from_json, sub)
from .numtheory import NotInvertible

HIT_INFINITY = "hit_infinity"
HIT_PLUS_MINUS_G = "hit_plus_minus_G"
DUPLICATE_X = "duplicate_x"


@dataclass(frozen=True)
class GeneratorInstance:
    curve: Curve
    G: Point
    W0: Point

    def __post_init__(self):
        if not isinstance(self.curve.ring, PrimeField):
            raise ValueError("generator instances live over a prime field")
        if self.G.is_infinity:
            raise ValueError("G must not be the point at infinity")
        for name, P in (("G", self.G), ("W0", self.W0)):
            if not self.curve.contains(P):
                raise ValueError(f"{name} is not on the curve")

    @property
    def p(self) -> int:
        return self.curve.ring.p

    def to_json(self) -> dict:
        return {"curve": self.curve.to_json(), "G": self.G.to_json(),
                "W0": self.W0.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "GeneratorInstance":
        curve = Curve.from_json(data["curve"])
        return cls(curve, curve.point_from_json(data["G"]),
                   curve.point_from_json(data["W0"]))


@dataclass
class StreamReport:
    """Outputs x_1, x_2, ... with per-index flags.

    ``flags[i]`` belongs to index i + 1.  When the orbit reaches infinity the
    stream stops there, so ``flags`` is one longer than ``values``.
    """

    values: list[int]
    flags: list[frozenset] = field(default_factory=list)

    @property
    def stopped_at_infinity(self) -> bool:
        return len(self.flags) > len(self.values)

    def to_json(self) -> dict:
        return {"values": [str(v) for v in self.values],
                "flags": [sorted(f) for f in self.flags]}

    @classmethod
    def from_json(cls, data) -> "StreamReport":
        if isinstance(data, list):
            values = [int(v) for v in data]
            return cls(values, [frozenset()] * len(values))
        values = [int(v) for v in data["values"]]
        flags = [frozenset(f) for f in data.get("flags", [[]] * len(values))]
        return cls(values, flags)


def emit_sequence(instance: GeneratorInstance, count: int) -> StreamReport:
    if count < 1:
        raise ValueError("count must be >= 1")
    curve, G = instance.curve, instance.G
    minus_G = negate(G, curve)
    values: list[int] = []
    flags: list[frozenset] = []
    W = instance.W0
    for n in range(1, count + 1):
        W = add(W, G, curve)
        if W.is_infinity:
            flags.append(frozenset({HIT_INFINITY}))
            break
        f = set()
        if W == G or W == minus_G:
            f.add(HIT_PLUS_MINUS_G)
        values.append(W.x)
        flags.append(frozenset(f))
    for i, v in enumerate(values[:7]):
        if values[:7].count(v) > 1:
            flags[i] = flags[i] | {DUPLICATE_X}
    return StreamReport(values, flags)


def x_sum_oracle(curve: Curve, W: Point, G: Point) -> tuple[Element, Element]:
    """Both sides of the x-sum identity for ``W`` and ``G``.

    Returns ``(x(W + G) + x(W - G), closed form in x(W), x(G), y(G)^2)``.
    """
    if W.is_infinity or G.is_infinity:
        raise ValueError("W and G must be affine")
    ring = curve.ring
    if W.x == G.x:
        raise ValueError("W must differ from +G and -G")
    left = ring.elem(add(W, G, curve).x + sub(W, G, curve).x)
    x, xg = W.x, G.x
    num = 2 * (curve.rhs(x) + ring.elem(G.y * G.y))
    right = ring.elem(num * ring.inv(ring.elem((x - xg) ** 2)) - 2 * (x + xg))
    return left, right


class DenominatorFailure(ArithmeticError):
    """``(x_{n-1} - x_G)^2`` is not invertible modulo m.

    ``g`` is its gcd with m; ``g == m`` means the denominator vanished
    outright, which over a prime field is the excluded ``W = +-G`` case.
    """

    def __init__(self, g: int, modulus: int, index: Optional[int] = None):
        super().__init__(f"denominator shares factor {g} with modulus {modulus}")
        self.g = g
        self.modulus = modulus
        self.index = index


@dataclass(frozen=True)
class XSequenceModel:
    """Parameters of the x-only recurrence: ring, x_G, y_G^2, A, B."""

    ring: Ring
    xG: Element
    yG2: Element
    A: Element
    B: Element

    def __post_init__(self):
        for name in ("xG", "yG2", "A", "B"):
            object.__setattr__(self, name, self.ring.elem(getattr(self, name)))

    @classmethod
    def from_instance(cls, instance: GeneratorInstance) -> "XSequenceModel":
        c, G = instance.curve, instance.G
        return cls(c.ring, G.x, G.y * G.y, c.A, c.B)

    def reduce(self, modulus: int) -> "XSequenceModel":
        ring = ResidueRing(modulus)
        return XSequenceModel(ring, self.xG, self.yG2, self.A, self.B)

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "xG": elem_to_json(self.xG),
                "yG2": elem_to_json(self.yG2), "A": elem_to_json(self.A),
                "B": elem_to_json(self.B)}

    @classmethod
    def from_json(cls, data: dict) -> "XSequenceModel":
        ring = ring_from_json(data["ring"])
        return cls(ring, *(elem_from_json(data[k], ring)
                           for k in ("xG", "yG2", "A", "B")))


def predict_next(model: XSequenceModel, x_prev2, x_prev1) -> Element:
    """One step of the x-only recurrence.

    Raises :class:`DenominatorFailure` over modular rings and
    ``ZeroDivisionError`` over the rationals when ``x_prev1 == x_G``.
    """
    ring = model.ring
    a, b = ring.elem(x_prev2), ring.elem(x_prev1)
    den = ring.elem((b - model.xG) ** 2)
    num = 2 * (b ** 3 + model.A * b + model.B + model.yG2)
    if isinstance(ring, Rationals):
        return num / den - 2 * (b + model.xG) - a
    try:
        inv = ring.inv(den)
    except NotInvertible as exc:
        raise DenominatorFailure(exc.g, ring.modulus) from None
    return ring.elem(num * inv - 2 * (b + model.xG) - a)


@dataclass
class PredictionRun:
    """Predicted x_3, x_4, ... and why the run stopped early, if it did."""

    values: list[Element]
    failure: Optional[DenominatorFailure] = None


def predict_run(model: XSequenceModel, x1, x2, count: int) -> PredictionRun:
    """Predict ``count`` values after the seeds ``x1, x2``.

    ``values[k]`` is the prediction for index ``k + 3``.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    ring = model.ring
    a, b = ring.elem(x1), ring.elem(x2)
    out: list[Element] = []
    for k in range(count):
        try:
            c = predict_next(model, a, b)
        except DenominatorFailure as exc:
            exc.index = k + 3
            return PredictionRun(out, exc)
        except ZeroDivisionError:
            return PredictionRun(out, DenominatorFailure(0, 0, k + 3))
        out.append(c)
        a, b = b, c
    return PredictionRun(out)


def orbit(instance: GeneratorInstance, count: int) -> list[Point]:
    """Points W_1..W_count, continuing through infinity."""
    pts, W = [], instance.W0
    for _ in range(count):
        W = add(W, instance.G, instance.curve)
        pts.append(W)
    return pts


__all__ = [
    "DUPLICATE_X", "DenominatorFailure", "GeneratorInstance", "HIT_INFINITY",
    "HIT_PLUS_MINUS_G", "INFINITY", "PredictionRun", "StreamReport",
    "XSequenceModel", "emit_sequence", "orbit", "predict_next", "predict_run",
    "x_sum_oracle",
]
