"""KMS states of Toeplitz noncommutative solenoids, computed at finite depth."""

from .circle import Arc, TrigPoly
from .cycle_subinv import NotSubinvariant, decompose_subinvariant, extreme_vectors
from .kms_tower import (
    KmsState,
    NoKmsStates,
    SolenoidPoint,
    ThetaSeq,
    convex_state,
    evaluate,
    extreme_state_from_solenoid,
    make_theta_seq,
    trace_state,
)
from .measures import CircleMeasure, check_subinvariance, lebesgue, make_mr, pushforward_cover, rotate_measure
from .toeplitz import AlgebraLevel, ToeplitzElement, parse_element

__all__ = [
    "AlgebraLevel",
    "Arc",
    "CircleMeasure",
    "KmsState",
    "NoKmsStates",
    "NotSubinvariant",
    "SolenoidPoint",
    "ThetaSeq",
    "ToeplitzElement",
    "TrigPoly",
    "check_subinvariance",
    "convex_state",
    "decompose_subinvariant",
    "evaluate",
    "extreme_state_from_solenoid",
    "extreme_vectors",
    "lebesgue",
    "make_mr",
    "make_theta_seq",
    "parse_element",
    "pushforward_cover",
    "rotate_measure",
    "trace_state",
]
