"""Bounded feedforward control for non-minimum-phase multibody systems.

The inverse model is posed as a servo-constraint DAE whose unknowns include
the control input; bounded solutions are computed as two-point boundary
value problems with either eigenspace or equilibrium-pinning boundary
conditions.
"""
from .mbs import (
    EquilibriumPoint,
    MbsState,
    NoConvergence,
    NumericFailure,
    SystemDims,
    SystemModel,
    eval_dynamics_residual,
    eval_output,
    find_equilibrium,
    linearize,
)
from .trajectory import SmoothTransition, eval_trajectory

__version__ = "0.1.0"

__all__ = [
    "EquilibriumPoint",
    "MbsState",
    "NoConvergence",
    "NumericFailure",
    "SmoothTransition",
    "SystemDims",
    "SystemModel",
    "eval_dynamics_residual",
    "eval_output",
    "eval_trajectory",
    "find_equilibrium",
    "linearize",
]
