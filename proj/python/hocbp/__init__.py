"""Compact convection-diffusion solver with bound-preserving limiting."""

from ._core import (
    ConditionAbort,
    UnknownProblemError,
    bp_limit,
    convergence,
    problem_names,
    run,
    tvb_limit,
)

__all__ = [
    "ConditionAbort",
    "UnknownProblemError",
    "bp_limit",
    "convergence",
    "problem_names",
    "run",
    "tvb_limit",
]
