"""Random generator instances, attack trials and aggregate statistics."""

from __future__ import annotations

import csv
import hashlib
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Optional

from .curve import Curve, PrimeField, add, random_point
from .generator import (HIT_PLUS_MINUS_G, GeneratorInstance,
                        StreamReport, XSequenceModel, emit_sequence,
                        predict_run)
from .numtheory import DEFAULT_MR_ROUNDS, random_prime
from .predictor import WINDOW, AttackError, attack_stream, recover_points

EXACT = "ExactRecovery"
PARTIAL = "PartialModulus"
RATIONAL = "RationalBranch"
INCONSISTENT = "Inconsistent"
STATUSES = (EXACT, PARTIAL, RATIONAL, INCONSISTENT)

HOLDOUT = 20


@dataclass(frozen=True)
class TrialConfig:
    prime_bits: int = 500
    revealed: int = 7
    trials: int = 1000
    master_seed: int = 0
    mr_rounds: int = DEFAULT_MR_ROUNDS

    def __post_init__(self):
        if self.prime_bits < 3:
            raise ValueError("prime_bits must be >= 3")
        if self.revealed < WINDOW:
            raise ValueError(f"revealed must be >= {WINDOW}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class TrialOutcome:
    index: int
    status: str
    params_congruent: bool
    prediction_ok: bool
    cofactor_bits: int = 0
    resamples: int = 0
    micros: int = 0
    detail: str = ""
    # filled for every non-exact trial so failures can be replayed
    instance: Optional[dict] = None


@dataclass
class ExperimentReport:
    config: TrialConfig
    counts: dict
    exact_rate: float
    mean_cofactor_bits: float
    max_cofactor_bits: int
    all_divisible: bool
    all_params_congruent: bool
    prediction_failures: int
    wall_clock: float
    outcomes: list = field(default_factory=list)

    def to_json(self, with_trials: bool = False) -> dict:
        out = {
            "config": asdict(self.config),
            "counts": dict(sorted(self.counts.items())),
            "exact_rate": self.exact_rate,
            "mean_cofactor_bits": self.mean_cofactor_bits,
            "max_cofactor_bits": self.max_cofactor_bits,
            "all_divisible": self.all_divisible,
            "all_params_congruent": self.all_params_congruent,
            "prediction_failures": self.prediction_failures,
            "wall_clock": round(self.wall_clock, 3),
            "non_exact": [asdict(o) for o in self.outcomes if o.status != EXACT],
        }
        if with_trials:
            out["trials"] = [asdict(o) for o in self.outcomes]
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "status", "cofactor_bits", "resamples", "micros"])
        for o in self.outcomes:
            w.writerow([o.index, o.status, o.cofactor_bits, o.resamples, o.micros])
        return buf.getvalue()


def trial_seed(master_seed: int, index: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def random_curve(p: int, rng: random.Random) -> Curve:
    while True:
        A, B = rng.randrange(p), rng.randrange(p)
        if (4 * A ** 3 + 27 * B ** 2) % p:
            return Curve(PrimeField(p), A, B)


def _usable(stream: StreamReport, revealed: int) -> bool:
    if len(stream.values) < revealed:
        return False
    if any(HIT_PLUS_MINUS_G in f for f in stream.flags[:revealed]):
        return False
    vals = stream.values[:revealed]
    return all(len(set(vals[k:k + WINDOW])) == WINDOW
               for k in range(revealed - WINDOW + 1))


def sample_instance(prime_bits: int, rng: random.Random, revealed: int = WINDOW,
                    mr_rounds: int = DEFAULT_MR_ROUNDS
                    ) -> tuple[GeneratorInstance, int]:
    """A random instance whose first ``revealed`` outputs meet the attack's
    hypotheses, with the number of rejected draws."""
    resamples = 0
    while True:
        p = random_prime(prime_bits, rng, mr_rounds)
        curve = random_curve(p, rng)
        inst = GeneratorInstance(curve, random_point(curve, rng), random_point(curve, rng))
        if _usable(emit_sequence(inst, revealed), revealed):
            return inst, resamples
        resamples += 1


def _params_congruent(params: XSequenceModel, truth: XSequenceModel, p: int) -> bool:
    try:
        return all((_mod(getattr(params, k), p) - getattr(truth, k)) % p == 0
                   for k in ("xG", "yG2", "A", "B"))
    except ZeroDivisionError:
        return False


def _mod(x, p: int) -> int:
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise ZeroDivisionError
        return x.numerator * pow(x.denominator, -1, p) % p
    return x % p


def predictions_mod_p(params: XSequenceModel, x1: int, x2: int, count: int,
                      p: int) -> tuple[list[int], Optional[int]]:
    """Predicted x_3.. reduced mod p, following the factor of m that holds p.

    A denominator failure with a factor g not divisible by p says nothing
    about p, so prediction resumes modulo m / g.  Returns the values and the
    index at which the recurrence broke down modulo p itself, if it did.
    """
    out: list[int] = []
    a, b = x1, x2
    while True:
        run = predict_run(params, a, b, count - len(out))
        out.extend(_mod(v, p) for v in run.values)
        if run.failure is None:
            return out, None
        m, g = params.ring.modulus, run.failure.g
        if g == 0 or g % p == 0:
            return out, len(out) + 3
        tail = [a, b] + run.values
        a, b = tail[-2], tail[-1]
        params = params.reduce(m // g)


def _instance_record(inst: GeneratorInstance, xs: list[int]) -> dict:
    rec = inst.to_json()
    rec["p"] = str(inst.p)
    rec["values"] = [str(x) for x in xs]
    return rec


def _check_predictions(params: XSequenceModel, truth: StreamReport, p: int) -> bool:
    xs = truth.values
    preds, broke_at = predictions_mod_p(params, xs[0], xs[1], len(xs) - 2, p)
    for k, v in enumerate(preds):
        if v != xs[k + 2] % p:
            return False
    if broke_at is not None and broke_at - 1 <= len(xs):
        # only legitimate when W_{n-1} = +-G modulo p
        return HIT_PLUS_MINUS_G in truth.flags[broke_at - 2]
    return True


def run_trial(config: TrialConfig, index: int) -> TrialOutcome:
    rng = random.Random(trial_seed(config.master_seed, index))
    inst, resamples = sample_instance(config.prime_bits, rng, config.revealed,
                                      config.mr_rounds)
    p = inst.p
    truth_stream = emit_sequence(inst, config.revealed + HOLDOUT)
    xs = truth_stream.values[:config.revealed]
    truth = XSequenceModel.from_instance(inst)
    t0 = time.perf_counter()
    try:
        model, _ = attack_stream(xs)
    except AttackError as exc:
        return TrialOutcome(index, INCONSISTENT, False, False, resamples=resamples,
                            micros=int((time.perf_counter() - t0) * 1e6),
                            detail=str(exc), instance=_instance_record(inst, xs))
    micros = int((time.perf_counter() - t0) * 1e6)
    congruent = _params_congruent(model.params, truth, p)
    pred_ok = _check_predictions(model.params, truth_stream, p)
    if model.branch == "rational":
        return TrialOutcome(index, RATIONAL, congruent, pred_ok, resamples=resamples,
                            micros=micros, instance=_instance_record(inst, xs))
    m = model.m
    if m % p:
        return TrialOutcome(index, INCONSISTENT, False, pred_ok, resamples=resamples,
                            micros=micros, detail="p does not divide m",
                            instance=_instance_record(inst, xs))
    if m == p and congruent:
        try:
            pts = recover_points(model, xs[0], xs[1])
            regen = emit_sequence(GeneratorInstance(pts.curve, pts.G, pts.W0),
                                  len(truth_stream.values))
            pred_ok = pred_ok and regen.values == truth_stream.values
        except AttackError as exc:
            return TrialOutcome(index, INCONSISTENT, congruent, False,
                                resamples=resamples, micros=micros, detail=str(exc),
                                instance=_instance_record(inst, xs))
        return TrialOutcome(index, EXACT, congruent, pred_ok, 0, resamples, micros)
    return TrialOutcome(index, PARTIAL, congruent, pred_ok, (m // p).bit_length(),
                        resamples, micros, instance=_instance_record(inst, xs))


def _run_one(args):
    return run_trial(*args)


def run_experiment(config: TrialConfig, jobs: int = 1) -> ExperimentReport:
    t0 = time.perf_counter()
    tasks = [(config, i) for i in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_run_one, tasks, chunksize=8))
    else:
        outcomes = [run_trial(*t) for t in tasks]
    outcomes.sort(key=lambda o: o.index)
    counts = {s: 0 for s in STATUSES}
    for o in outcomes:
        counts[o.status] += 1
    partial = [o.cofactor_bits for o in outcomes if o.status == PARTIAL]
    return ExperimentReport(
        config=config,
        counts=counts,
        exact_rate=counts[EXACT] / config.trials,
        mean_cofactor_bits=sum(partial) / len(partial) if partial else 0.0,
        max_cofactor_bits=max(partial, default=0),
        all_divisible=all(o.status in (EXACT, PARTIAL) for o in outcomes),
        all_params_congruent=all(o.params_congruent for o in outcomes),
        prediction_failures=sum(not o.prediction_ok for o in outcomes),
        wall_clock=time.perf_counter() - t0,
        outcomes=outcomes,
    )


# ---- exhaustive small-field corpus -------------------------------------

SMALL_PRIMES = (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass
class SmallCurve:
    curve: Curve
    points: list
    table: dict

    @property
    def p(self) -> int:
        return self.curve.ring.p


def small_curves(p: int) -> Iterator[Curve]:
    for A, B in product(range(p), repeat=2):
        if (4 * A ** 3 + 27 * B ** 2) % p:
            yield Curve(PrimeField(p), A, B)


def group_table(curve: Curve, points: list) -> dict:
    return {(P, Q): add(P, Q, curve) for P in points for Q in points}


def brute_force_oracle(p_max: int) -> Iterator[SmallCurve]:
    """Every nonsingular curve over F_p, 5 <= p <= p_max, with its points and
    full addition table."""
    if p_max > 50:
        raise ValueError("p_max must be <= 50")
    for p in SMALL_PRIMES:
        if p > p_max:
            break
        for curve in small_curves(p):
            pts = curve.points()
            yield SmallCurve(curve, pts, group_table(curve, pts))


def valid_instances(small: SmallCurve) -> Iterator[tuple[GeneratorInstance, list[int]]]:
    """All (G, W_0) on a small curve whose first seven outputs satisfy the
    attack's hypotheses."""
    for G in small.points[1:]:
        for W0 in small.points:
            inst = GeneratorInstance(small.curve, G, W0)
            s = emit_sequence(inst, WINDOW)
            if _usable(s, WINDOW):
                yield inst, s.values
