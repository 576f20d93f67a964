"""Command line: ``gen``, ``attack``, ``verify`` and ``experiment``.

Every integer crosses the boundary as a decimal string inside JSON.  Exit
codes: 0 success, 1 usage or parse error, 2 typed domain inconsistency.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional, Sequence

from .curve import Curve, PrimeField
from .generator import (HIT_INFINITY, GeneratorInstance, StreamReport,
                        emit_sequence, predict_run)
from .harness import TrialConfig, run_experiment, sample_instance
from .numtheory import is_probable_prime
from .predictor import (WINDOW, AttackError, attack_stream, model_from_json,
                        recover_points, self_check)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from None


def _pair(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {v}")
    return v


def cmd_gen(args) -> int:
    if args.random:
        if args.bits is None:
            raise UsageError("--random needs --bits")
        if args.bits < 3:
            raise UsageError("--bits must be >= 3")
        rng = random.Random(args.seed)
        inst, _ = sample_instance(args.bits, rng, max(WINDOW, min(args.count, 32)))
    else:
        missing = [f for f in ("p", "A", "B", "G", "W0") if getattr(args, f) is None]
        if missing:
            raise UsageError("explicit instance needs " + ", ".join("--" + f for f in missing))
        if args.p <= 3:
            raise UsageError("p must be a prime > 3")
        if not is_probable_prime(args.p):
            raise DomainError(f"p = {args.p} is not prime")
        try:
            curve = Curve(PrimeField(args.p), args.A, args.B)
            inst = GeneratorInstance(curve, curve.point(*args.G), curve.point(*args.W0))
        except ValueError as exc:
            raise DomainError(str(exc)) from None
    report = emit_sequence(inst, args.count)
    out = report.to_json()
    if args.reveal_secrets:
        out["instance"] = inst.to_json()
    _emit(out)
    return EXIT_OK


def _read_values(path: str) -> StreamReport:
    data = _read_json(path)
    try:
        return StreamReport.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed stream: {exc}") from None


def cmd_attack(args) -> int:
    stream = _read_values(args.input)
    xs = stream.values
    if len(xs) < WINDOW:
        raise UsageError(f"need at least {WINDOW} values, got {len(xs)}")
    if any(x < 0 for x in xs):
        raise UsageError("values must be nonnegative")
    try:
        model, used = attack_stream(xs, args.windows)
    except AttackError as exc:
        _emit({"branch": "error", "stage": exc.stage, "error": type(exc).__name__,
               "message": str(exc)})
        return EXIT_DOMAIN
    out = model.to_json()
    out["windows_used"] = used
    run = predict_run(model.params, xs[0], xs[1], len(xs) - 2)
    checks = self_check(model, xs)
    out["self_check"] = {
        "predicted": [str(v) for v in run.values],
        "all_match": all(checks),
        "mismatches": [k + 3 for k, ok in enumerate(checks) if not ok],
    }
    if model.branch == "modular" and is_probable_prime(model.m):
        try:
            out["points"] = recover_points(model, xs[0], xs[1]).to_json()
        except AttackError as exc:
            out["points_error"] = str(exc)
    _emit(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        model = model_from_json(_read_json(args.model))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed model: {exc}") from None
    stream = _read_values(args.stream)
    xs = stream.values
    if len(xs) < 2:
        raise UsageError("stream needs at least two values")
    ring = model.params.ring
    run = predict_run(model.params, xs[0], xs[1], len(xs) - 2)
    rows = [{"index": 1, "status": "seed"}, {"index": 2, "status": "seed"}]
    n_total = max(len(xs), len(stream.flags))
    for n in range(3, n_total + 1):
        k = n - 3
        flags = stream.flags[n - 1] if n - 1 < len(stream.flags) else frozenset()
        if HIT_INFINITY in flags or n > len(xs):
            rows.append({"index": n, "status": "skipped"})
        elif k < len(run.values):
            ok = run.values[k] == ring.elem(xs[n - 1])
            rows.append({"index": n, "status": "match" if ok else "mismatch",
                         "predicted": str(run.values[k])})
        elif run.failure is not None and k == len(run.values):
            rows.append({"index": n, "status": "denominator-failure",
                         "factor": str(run.failure.g)})
        else:
            rows.append({"index": n, "status": "no-prediction"})
    summary = {}
    for r in rows:
        summary[r["status"]] = summary.get(r["status"], 0) + 1
    _emit({"summary": summary, "all_match": summary.get("mismatch", 0) == 0
           and summary.get("denominator-failure", 0) == 0
           and summary.get("no-prediction", 0) == 0, "indices": rows})
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        config = TrialConfig(args.bits, args.revealed, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_experiment(config, jobs=args.jobs)
    payload = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    print(f"exact recovery {report.exact_rate:.1%} over {config.trials} trials "
          f"in {report.wall_clock:.1f}s", file=sys.stderr)
    _emit(payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eclcg", description="Elliptic curve congruential generator and its predictor")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a generator output stream")
    g.add_argument("--random", action="store_true", help="sample a random instance")
    g.add_argument("--bits", type=int, help="prime size for --random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=_positive, default=10)
    g.add_argument("--p", type=int)
    g.add_argument("--A", type=int)
    g.add_argument("--B", type=int)
    g.add_argument("--G", type=_pair, metavar="X,Y")
    g.add_argument("--W0", type=_pair, metavar="X,Y")
    g.add_argument("--reveal-secrets", action="store_true",
                   help="include the instance in the output")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("attack", help="recover a model from >= 7 outputs")
    a.add_argument("input", nargs="?", default="-",
                   help="JSON array of decimal strings, or a gen stream (default stdin)")
    a.add_argument("--windows", choices=("all", "first"), default="all")
    a.set_defaults(func=cmd_attack)

    v = sub.add_parser("verify", help="replay a model against a stream")
    v.add_argument("--model", required=True)
    v.add_argument("--stream", required=True)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="run random attack trials")
    e.add_argument("--bits", type=_positive, default=500)
    e.add_argument("--revealed", type=_positive, default=7)
    e.add_argument("--trials", type=_positive, default=1000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--jobs", type=_positive, default=1)
    e.add_argument("--out")
    e.add_argument("--csv")
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
