"""Bounded-height enumeration in number fields with certified error control."""

from .arith import Ball, Rat, RefineNeeded, SingularMatrixError, log_ball, mat_inverse, operator_norm_bound
from .roots import BallC, NonIsolatingEnclosureError, refine_root

__all__ = [
    "Ball",
    "BallC",
    "Rat",
    "RefineNeeded",
    "SingularMatrixError",
    "NonIsolatingEnclosureError",
    "log_ball",
    "mat_inverse",
    "operator_norm_bound",
    "refine_root",
]
