"""Elliptic curve congruential generator and its parameter-recovery attack."""

from .curve import (INFINITY, AdditionFailure, Curve, Point, PrimeField,
                    Rationals, ResidueRing)
from .generator import (DenominatorFailure, GeneratorInstance, StreamReport,
                        XSequenceModel, emit_sequence, predict_next,
                        predict_run)
from .predictor import (AttackError, DistinctnessViolation, InconsistentInput,
                        ModularModel, RationalModel, attack, attack_stream,
                        recover_points, refine_windows)

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "AdditionFailure", "AttackError", "Curve", "DenominatorFailure",
    "DistinctnessViolation", "GeneratorInstance", "InconsistentInput",
    "ModularModel", "Point", "PrimeField", "RationalModel", "Rationals",
    "ResidueRing", "StreamReport", "XSequenceModel", "attack", "attack_stream",
    "emit_sequence", "predict_next", "predict_run", "recover_points",
    "refine_windows",
]
