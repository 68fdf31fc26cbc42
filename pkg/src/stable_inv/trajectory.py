"""Smooth rest-to-rest reference trajectories for the system output.

The transition is a degree-9 polynomial whose first four derivatives vanish
at both ends, extended by constants outside the transition window.  Four
vanishing derivatives cover the relative degree of every model shipped here
and keep the servo-constraint forcing bounded and C^4.
"""
from dataclasses import dataclass

import numpy as np

# Minimum-jerk-family smoothstep: p(s) = 126 s^5 - 420 s^6 + 540 s^7 - 315 s^8 + 70 s^9,
# p(0)=0, p(1)=1, p^(i)(0)=p^(i)(1)=0 for i=1..4, p(s)+p(1-s)=1.
_STEP_COEFFS = np.zeros(10)
_STEP_COEFFS[5:] = [126.0, -420.0, 540.0, -315.0, 70.0]

MAX_DERIVATIVE = 4


class UnsupportedDerivativeOrder(ValueError):
    """Raised when a derivative beyond the supported order is requested."""


def _derivative_coeffs(order):
    c = _STEP_COEFFS
    for _ in range(order):
        c = c[1:] * np.arange(1, c.size)
    return c


_DERIV_COEFFS = [_derivative_coeffs(k) for k in range(MAX_DERIVATIVE + 1)]


@dataclass(frozen=True)
class SmoothTransition:
    """Scalar output transition z0 -> zf over [t0, tf], constant outside."""

    z0: float
    zf: float
    t0: float
    tf: float

    def __post_init__(self):
        if not self.tf > self.t0:
            raise ValueError(f"tf must exceed t0, got t0={self.t0}, tf={self.tf}")

    @property
    def duration(self):
        return self.tf - self.t0

    def __call__(self, t, deriv_order=0):
        return eval_trajectory(self, t, deriv_order)


def eval_trajectory(traj, t, deriv_order=0):
    """Evaluate the transition or one of its first four time derivatives.

    Scalar or array `t` is accepted; outside [t0, tf] the value is the
    constant endpoint and every derivative is zero.
    """
    if deriv_order < 0 or deriv_order > MAX_DERIVATIVE:
        raise UnsupportedDerivativeOrder(
            f"derivative order {deriv_order} not supported (max {MAX_DERIVATIVE})"
        )
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    T = traj.duration
    s = np.clip((t - traj.t0) / T, 0.0, 1.0)
    coeffs = _DERIV_COEFFS[deriv_order]
    # Horner evaluation of the derivative polynomial in s.
    p = np.zeros_like(s)
    for c in coeffs[::-1]:
        p = p * s + c
    scale = (traj.zf - traj.z0) / T**deriv_order
    out = scale * p
    if deriv_order == 0:
        out += traj.z0
    else:
        # Constant extensions have zero derivatives.
        inside = (t > traj.t0) & (t < traj.tf)
        out = np.where(inside, out, 0.0)
    return float(out[0]) if scalar else out


def trajectory_stack(traj, t):
    """Value and first two derivatives at `t`, stacked as (z, zdot, zddot)."""
    return tuple(eval_trajectory(traj, t, k) for k in range(3))
