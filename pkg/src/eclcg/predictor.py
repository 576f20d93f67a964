"""Recover an x-only generator model from seven consecutive outputs.

Seven outputs give five congruences, linear in the unknown vector
``(x_G, x_G^2, A, B, y_G^2, x_G^3)``.  Its coefficient matrix C has the
columns c_1..c_6 and right-hand side u; the secret prime divides
``det(c_1, c_2, c_3, c_4, u)``.  Starting from that determinant the modulus
is shrunk by gcd steps that each provably keep the prime, until the system
has a unique solution with ``e_1^2 = e_2``.  The last three unknowns only
appear as ``e_4 + e_5 - e_6``, so four numbers lambda_1..lambda_4 carry
all of the recoverable information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .curve import (Curve, Point, PrimeField, Rationals, ResidueRing, add,
                    sub)
from .generator import XSequenceModel, predict_run
from .linalg import IntMatrix, adjugate, det_bareiss, kernel_vector_mod
from .numtheory import (coprime_part, ext_gcd, gcd,
                        is_probable_prime, mod_inv, sqrt_mod_prime)

WINDOW = 7


class AttackError(Exception):
    """Base class for typed attack outcomes; ``stage`` names the step."""

    def __init__(self, stage: str, message: str, **details):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.details = details


class DistinctnessViolation(AttackError):
    pass


class InconsistentInput(AttackError):
    pass


class MixedBranch(AttackError):
    pass


class NotPrime(AttackError):
    pass


class NoSquareRoot(AttackError):
    pass


@dataclass(frozen=True)
class LinearSystem:
    """The 5x6 matrix C and right-hand side u of the congruence C e = u."""

    C: IntMatrix
    u: tuple[int, ...]

    def __post_init__(self):
        if self.C.shape != (5, 6) or len(self.u) != 5:
            raise ValueError("expected a 5x6 matrix and a 5-vector")
        if set(self.C.col(4)) != {2} or set(self.C.col(5)) != {-2}:
            raise ValueError("columns 5 and 6 must be constant 2 and -2")

    @classmethod
    def from_columns(cls, c1, c2, c3, c4, u) -> "LinearSystem":
        return cls(IntMatrix.from_columns([c1, c2, c3, c4, [2] * 5, [-2] * 5]),
                   tuple(u))

    def column(self, k: int) -> tuple[int, ...]:
        """1-based column ``c_k``."""
        return self.C.col(k - 1)

    @property
    def core(self) -> IntMatrix:
        """The 5x4 block (c_1, c_2, c_3, c_4)."""
        return self.C.submatrix(range(5), range(4))

    @property
    def augmented(self) -> IntMatrix:
        """The 5x5 block (c_1, c_2, c_3, c_4, u)."""
        return IntMatrix.from_columns([self.column(k) for k in range(1, 5)] + [self.u])

    def residual(self, lambdas: Sequence[int], mu: int) -> tuple[int, ...]:
        """``sum(lambda_i c_i) - mu u``, exactly."""
        lhs = self.core @ lambdas
        return tuple(a - mu * b for a, b in zip(lhs, self.u))


@dataclass(frozen=True)
class LambdaSolution:
    """``sum(lambda_i c_i) == mu u`` modulo ``modulus`` (0 means exactly)."""

    lambdas: tuple[int, int, int, int]
    mu: int
    modulus: int

    def check(self, system: LinearSystem) -> bool:
        r = system.residual(self.lambdas, self.mu)
        if self.modulus == 0:
            return not any(r)
        return all(x % self.modulus == 0 for x in r)


@dataclass(frozen=True)
class ModularModel:
    m: int
    params: XSequenceModel
    solution: Optional[LambdaSolution] = None
    trace: tuple[int, ...] = ()

    branch = "modular"

    def to_json(self) -> dict:
        p = self.params
        return {"branch": self.branch, "m": str(self.m), "A": str(p.A),
                "B": str(p.B), "xG": str(p.xG), "yG2": str(p.yG2)}


@dataclass(frozen=True)
class RationalModel:
    params: XSequenceModel
    mu: int
    solution: Optional[LambdaSolution] = None

    branch = "rational"

    @property
    def m(self) -> int:
        return 0

    def to_json(self) -> dict:
        p = self.params
        return {"branch": self.branch, "m": "0", "mu": str(self.mu),
                "A": str(p.A), "B": str(p.B), "xG": str(p.xG), "yG2": str(p.yG2)}


RecoveredModel = Union[ModularModel, RationalModel]


def model_from_json(data: dict) -> RecoveredModel:
    if data.get("branch") == "rational":
        params = XSequenceModel(Rationals(), *(Fraction(data[k])
                                              for k in ("xG", "yG2", "A", "B")))
        return RationalModel(params, int(data.get("mu", 1)))
    m = int(data["m"])
    params = XSequenceModel(ResidueRing(m), *(int(data[k])
                                              for k in ("xG", "yG2", "A", "B")))
    return ModularModel(m, params)


def build_system(xs: Sequence[int]) -> LinearSystem:
    """Rows i = 2..6 of C and u from seven consecutive outputs."""
    xs = [int(x) for x in xs]
    if len(xs) != WINDOW:
        raise ValueError(f"need exactly {WINDOW} values, got {len(xs)}")
    if any(x < 0 for x in xs):
        raise ValueError("outputs must be nonnegative")
    if len(set(xs)) != WINDOW:
        raise DistinctnessViolation("build_system", "input values are not pairwise distinct")
    rows, u = [], []
    for i in range(1, 6):
        prev, x, nxt = xs[i - 1], xs[i], xs[i + 1]
        s = prev + nxt
        rows.append([2 * x * x + 2 * x * s, 2 * x - s, 2 * x, 2, 2, -2])
        u.append(s * x * x)
    return LinearSystem(IntMatrix.from_rows(rows), tuple(u))


def initial_modulus(system: LinearSystem) -> int:
    return abs(det_bareiss(system.augmented))


def _normalize(m: int, stage: str) -> int:
    m = coprime_part(m, 6) if m else m
    if m < 2:
        raise InconsistentInput(stage, "modulus collapsed below 2")
    return m


def reduce_dependencies(system: LinearSystem, m: int) -> int:
    """Shrink ``m`` until c_1..c_4 are independent modulo it."""
    core = system.core
    while True:
        lam = kernel_vector_mod(core, m)
        if lam is None:
            return m
        new = gcd(m, *lam)
        # lam != 0 mod m, so this is a proper divisor
        assert new < m
        m = _normalize(new, "reduce_dependencies")


def _combined_adjugate_kernel(N: IntMatrix, m: int) -> tuple[int, ...]:
    # every adjugate column lies in the kernel mod m since m | det; combine
    # them so the last coordinate is the gcd of its row (the maximal minors
    # of c_1..c_4), which is a unit once those columns are independent mod m
    adj = adjugate(N)
    last = adj.row(4)
    coeffs = [0] * 5
    g = 0
    for j, a in enumerate(last):
        g2, s, t = ext_gcd(g, a)
        coeffs = [c * s for c in coeffs]
        coeffs[j] = t
        g = g2
    return tuple(x % m for x in adj @ coeffs)


def solve_lambda_mod(system: LinearSystem, m: int) -> tuple[LambdaSolution, int]:
    """Solve ``sum(lambda_i c_i) == u (mod m')`` for a divisor m' of m.

    m' is the part of m coprime to the coefficient mu of u in the kernel
    vector, so that mu can be scaled to 1.
    """
    N = system.augmented.mod(m)
    v = _combined_adjugate_kernel(N, m)
    if any(x % m for x in N @ v) or math.gcd(v[4], m) != 1:
        v = kernel_vector_mod(N, m)
        if v is None:
            raise InconsistentInput("solve_lambda_mod", "augmented system has full rank mod m")
    mu = -v[4] % m
    if mu == 0:
        raise InconsistentInput("solve_lambda_mod", "u is independent of c_1..c_4 mod m")
    m = _normalize(coprime_part(m, mu), "solve_lambda_mod")
    inv = mod_inv(mu, m)
    lam = tuple(x * inv % m for x in v[:4])
    sol = LambdaSolution(lam, 1, m)
    if not sol.check(system):
        raise InconsistentInput("solve_lambda_mod", "lambda solution failed verification")
    return sol, m


def enforce_quadratic(l1: int, l2: int, m: int) -> int:
    """Keep only the part of m where ``lambda_1^2 == lambda_2``."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    d = l1 * l1 - l2
    if d % m == 0:
        return m
    return _normalize(math.gcd(m, d), "enforce_quadratic")


def extract_params(sol: LambdaSolution) -> XSequenceModel:
    m = sol.modulus
    l1, _, l3, l4 = sol.lambdas
    half = mod_inv(2, m)
    return XSequenceModel(ResidueRing(m), xG=l1,
                          yG2=l1 ** 3 + (l4 + l1 * l3) * half,
                          A=l3, B=(l4 - l1 * l3) * half)


def rational_params(sol: LambdaSolution) -> XSequenceModel:
    l1, _, l3, l4 = sol.lambdas
    mu = sol.mu
    x = Fraction(l1, mu)
    return XSequenceModel(Rationals(), xG=x,
                          yG2=x ** 3 + Fraction(l4, 2 * mu) + Fraction(l1 * l3, 2 * mu * mu),
                          A=Fraction(l3, mu),
                          B=Fraction(l4, 2 * mu) - Fraction(l1 * l3, 2 * mu * mu))


def solve_rational(system: LinearSystem) -> tuple[LambdaSolution, int]:
    """Primitive integer relation ``sum(lambda_i c_i) == mu u`` with mu > 0.

    Returns the relation and the continuation modulus
    ``|lambda_1^2 - lambda_2 mu| / gcd(lambda_1^2, mu)``; a zero modulus
    means the rational model is final.
    """
    N = system.augmented
    if det_bareiss(N) != 0:
        raise ValueError("solve_rational needs a singular augmented matrix")
    # rank 4 makes the adjugate rank 1 with every column in the kernel
    adj = adjugate(N)
    col = next((adj.col(j) for j in range(5) if any(adj.col(j))), None)
    if col is None:
        raise InconsistentInput("solve_rational", "augmented system has rank below 4")
    g = gcd(*col)
    v = [x // g for x in col]
    if v[4] == 0:
        raise InconsistentInput("solve_rational", "u is independent of c_1..c_4")
    if v[4] > 0:
        v = [-x for x in v]
    lam, mu = tuple(v[:4]), -v[4]
    sol = LambdaSolution(lam, mu, 0)
    if not sol.check(system):
        raise AssertionError("rational relation failed verification")
    l1, l2 = lam[0], lam[1]
    m = abs(l1 * l1 - l2 * mu) // math.gcd(l1 * l1, mu)
    return sol, m


def enforce_units(system: LinearSystem, sol: LambdaSolution) -> int:
    """Drop the part of m where the recovered model degenerates.

    Each row i multiplied the relation through by ``(x_i - x_G)^2`` and the
    curve must be nonsingular; modulo the true prime neither value can
    vanish, so any common factor with m is spurious.
    """
    m = sol.modulus
    l1, _, l3, l4 = sol.lambdas
    half = mod_inv(2, m)
    A, B = l3, (l4 - l1 * l3) * half
    checks = [2 * l1 - c3 for c3 in system.column(3)]
    checks.append(4 * A ** 3 + 27 * B ** 2)
    for d in checks:
        g = math.gcd(d, m)
        if g > 1:
            m = _normalize(coprime_part(m, g), "enforce_units")
    return m


def solve_system(system: LinearSystem, bound: int = 0) -> RecoveredModel:
    """Run the modulus reduction pipeline on a prepared system.

    ``bound`` is the largest revealed output; a final modulus not above it
    cannot contain the generator's prime.
    """
    m = initial_modulus(system)
    trace = [m]
    if m == 0:
        sol, m = solve_rational(system)
        if m == 0:
            return RationalModel(rational_params(sol), sol.mu, sol)
        trace.append(m)
    m = _normalize(m, "initial_modulus")
    trace.append(m)
    m = reduce_dependencies(system, m)
    trace.append(m)
    while True:
        sol, m = solve_lambda_mod(system, m)
        trace.append(m)
        reduced = enforce_quadratic(sol.lambdas[0], sol.lambdas[1], m)
        if reduced == m:
            reduced = enforce_units(system, sol)
            if reduced == m:
                break
        # lambdas are re-solved under the smaller modulus
        m = reduced
        trace.append(m)
    if m <= bound:
        raise InconsistentInput("plausibility", f"modulus {m} does not exceed the largest output {bound}",
                                modulus=m)
    return ModularModel(m, extract_params(sol), sol, tuple(trace))


def attack(xs: Sequence[int]) -> RecoveredModel:
    """Recover a model reproducing seven consecutive outputs."""
    system = build_system(xs)
    return solve_system(system, bound=max(int(x) for x in xs))


def refine_windows(models: Sequence[RecoveredModel]) -> RecoveredModel:
    """Combine models from overlapping windows of the same stream."""
    if not models:
        raise ValueError("no models to refine")
    kinds = {mod.branch for mod in models}
    if len(kinds) > 1:
        raise MixedBranch("refine_windows", "cannot merge rational and modular models")
    if kinds == {"rational"}:
        if any(mod.params != models[0].params for mod in models):
            raise InconsistentInput("refine_windows", "rational models disagree")
        return models[0]
    m = 0
    first = models[0].params
    for mod in models:
        p = mod.params
        m = gcd(m, mod.m, p.A - first.A, p.B - first.B, p.xG - first.xG,
                p.yG2 - first.yG2)
    m = _normalize(m, "refine_windows")
    return ModularModel(m, first.reduce(m), models[0].solution,
                        models[0].trace + (m,))


def window_models(xs: Sequence[int], windows: str = "all") -> list[RecoveredModel]:
    xs = [int(x) for x in xs]
    if len(xs) < WINDOW:
        raise ValueError(f"need at least {WINDOW} values, got {len(xs)}")
    starts = range(len(xs) - WINDOW + 1) if windows == "all" else range(1)
    return [attack(xs[k:k + WINDOW]) for k in starts]


def attack_stream(xs: Sequence[int], windows: str = "all") -> tuple[RecoveredModel, int]:
    """Attack every 7-window and refine; returns the model and windows used."""
    models = window_models(xs, windows)
    model = refine_windows(models) if len(models) > 1 else models[0]
    if model.branch == "modular" and model.m <= max(int(x) for x in xs):
        raise InconsistentInput("plausibility", "refined modulus does not exceed the outputs")
    return model, len(models)


@dataclass(frozen=True)
class RecoveredPoints:
    curve: Curve
    G: Point
    W1: Point
    W0: Point

    def to_json(self) -> dict:
        return {"curve": self.curve.to_json(), "G": self.G.to_json(),
                "W1": self.W1.to_json(), "W0": self.W0.to_json()}


def recover_points(model: ModularModel, x1: int, x2: int) -> RecoveredPoints:
    """Lift a prime-modulus model to actual points G, W_1 and W_0.

    The result is determined only up to negating every point at once.
    """
    if model.branch != "modular":
        raise NotPrime("recover_points", "rational models have no prime modulus")
    p = model.m
    if not is_probable_prime(p):
        raise NotPrime("recover_points", "modulus is composite", modulus=p)
    prm = model.params
    try:
        curve = Curve(PrimeField(p), prm.A, prm.B)
    except ValueError as exc:
        raise InconsistentInput("recover_points", str(exc)) from None
    yG = sqrt_mod_prime(prm.yG2, p)
    y1 = sqrt_mod_prime(curve.rhs(x1), p)
    if yG is None or y1 is None:
        raise NoSquareRoot("recover_points", "required square root does not exist")
    for s1 in (y1, -y1 % p):
        for sg in (yG, -yG % p):
            W1, G = Point(x1 % p, s1), Point(prm.xG, sg)
            W2 = add(W1, G, curve)
            if not W2.is_infinity and W2.x == x2 % p:
                return RecoveredPoints(curve, G, W1, sub(W1, G, curve))
    raise InconsistentInput("recover_points", "no sign choice reproduces x_2")


def self_check(model: RecoveredModel, xs: Sequence[int]) -> list[bool]:
    """Re-predict x_3.. from x_1, x_2 and compare with the input."""
    run = predict_run(model.params, xs[0], xs[1], len(xs) - 2)
    ring = model.params.ring
    out = []
    for k, x in enumerate(xs[2:]):
        out.append(k < len(run.values) and run.values[k] == ring.elem(x))
    return out
