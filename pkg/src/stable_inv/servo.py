"""Servo-constraint inverse model: the plant plus output-tracking constraints.

Appending s(y, t) = h(y) - z_d(t) = 0 to the equations of motion turns the
control input into an unknown of a differential-algebraic system whose
solution is the exact feedforward signal.  Per mesh node the unknowns are
stacked as x = [y, v, lam, u].
"""
from dataclasses import dataclass

import numpy as np

from .trajectory import SmoothTransition, eval_trajectory


@dataclass(frozen=True)
class UnknownLayout:
    """Index bookkeeping for the stacked inverse-model unknowns."""

    n: int
    n_c: int
    m: int

    @property
    def dim(self):
        return 2 * self.n + self.n_c + self.m

    @property
    def y(self):
        return slice(0, self.n)

    @property
    def v(self):
        return slice(self.n, 2 * self.n)

    @property
    def lam(self):
        return slice(2 * self.n, 2 * self.n + self.n_c)

    @property
    def u(self):
        return slice(2 * self.n + self.n_c, self.dim)

    def split(self, x):
        x = np.asarray(x)
        return x[..., self.y], x[..., self.v], x[..., self.lam], x[..., self.u]

    def join(self, y, v, lam, u):
        return np.concatenate([y, v, np.atleast_1d(lam), np.atleast_1d(u)], axis=-1)


@dataclass(frozen=True)
class ServoSystem:
    """A :class:`SystemModel` driven along desired output trajectories."""

    model: object
    trajectories: tuple

    def __post_init__(self):
        trajs = self.trajectories
        if isinstance(trajs, SmoothTransition):
            trajs = (trajs,)
        object.__setattr__(self, "trajectories", tuple(trajs))
        if len(self.trajectories) != self.model.dims.m:
            raise ValueError(
                f"{len(self.trajectories)} trajectory channels for m={self.model.dims.m}"
            )

    def z_desired(self, t, order=0):
        return np.array([eval_trajectory(tr, t, order) for tr in self.trajectories])


def unknown_layout(servo):
    dims = servo.model.dims
    return UnknownLayout(n=dims.n, n_c=dims.n_c, m=dims.m)


def servo_residual(servo, x, ydot, vdot, t):
    """Residual of the inverse-model DAE at one time instant.

    Stacked as [ydot - Z v; M vdot + k - q - C^T lam - B u; c; h(y) - z_d].
    Time derivatives come from the caller (the collocation scheme); the
    residual itself is purely algebraic in its arguments.
    """
    model = servo.model
    lay = unknown_layout(servo)
    y, v, lam, u = lay.split(np.asarray(x, dtype=float))
    ydot = np.asarray(ydot, dtype=float)
    vdot = np.asarray(vdot, dtype=float)

    kin = ydot - model.Zv(y, v)
    force = model.M(y, t) @ vdot + model.k(y, v, t) - model.q(y, v, t) - model.B(y) @ u
    if model.dims.n_c:
        force = force - model.constraint_jacobian(y, v, u, t).T @ lam
        cons = model.constraints(y, v, u, t)
    else:
        cons = np.zeros(0)
    servo_rows = np.atleast_1d(model.h(y)) - servo.z_desired(t)
    return np.concatenate([kin, force, cons, servo_rows])
