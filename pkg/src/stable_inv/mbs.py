"""Core multibody-system abstraction shared by all models.

A system is described in the first-order form

    ydot = Z(y) v
    M(y, t) vdot + k(y, v, t) = q(y, v, t) + C(y, v, u, t)^T lam + B(y) u
    c(y, v, u, t) = 0

with output z = h(y).  Evaluators are plain functions bundled in an
immutable :class:`SystemModel`, so analytic models (two-link arm) and
assembled finite-element models (ANCF beam) share one interface.

Constraints are kept in two groups: position-level rows ``c_pos(y, t)``
(e.g. a pin joint) and velocity-level rows ``c_vel(y, v, u, t)`` (e.g. a
velocity-controlled actuator, which is why the input appears).  The
multiplier-distribution matrix C stacks d(c_pos)/dy over d(c_vel)/dv.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class NumericFailure(RuntimeError):
    """An evaluator produced non-finite output; carries the block name."""

    def __init__(self, block, message=""):
        self.block = block
        super().__init__(f"non-finite values in block '{block}'" + (f": {message}" if message else ""))


class NoConvergence(RuntimeError):
    """Newton iteration failed to converge; carries the residual history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


@dataclass(frozen=True)
class SystemDims:
    """Coordinate counts: n coordinates, n_c constraints, m inputs/outputs."""

    n: int
    n_c: int
    m: int

    def __post_init__(self):
        if self.m < 1 or self.n_c < 0 or self.n < 1:
            raise ValueError(f"invalid dimensions {self}")

    @property
    def f(self):
        """Degrees of freedom, n - n_c."""
        return self.n - self.n_c

    @property
    def x_dim(self):
        """Dimension of the stacked unknown [y, v, lam, u]."""
        return 2 * self.n + self.n_c + self.m


@dataclass(frozen=True)
class MbsState:
    """Positions y, velocities v and time t."""

    y: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if np.shape(self.y) != np.shape(self.v):
            raise ValueError("y and v must have equal shapes")


@dataclass(frozen=True)
class SystemModel:
    """Evaluator bundle for one multibody system.

    ``Z=None`` means the identity kinematics ydot = v.  ``constant_mass``
    marks models whose mass matrix does not depend on (y, t); solvers then
    factorize it once.

    The three optional Jacobian callables make the solvers' Newton matrices
    analytic; any that are absent are replaced by finite differences:

    * ``force_jacobian(y, v, lam, u, t)`` -> dict with the derivatives of
      F = q - k + C^T lam + B u under keys ``Fy``, ``Fv`` (n, n), ``Flam``
      (n, n_c) and ``Fu`` (n, m).
    * ``alg_jacobian(y, v, u, t)`` -> dict with the derivatives of the
      stacked constraints under keys ``Gy``, ``Gv`` (n_c, n), ``Gu``
      (n_c, m).
    * ``dh_dy(y)`` -> (m, n).
    """

    dims: SystemDims
    M: Callable                     # (y, t) -> (n, n)
    k: Callable                     # (y, v, t) -> (n,)
    q: Callable                     # (y, v, t) -> (n,)
    B: Callable                     # (y,) -> (n, m)
    h: Callable                     # (y,) -> (m,)
    Z: Optional[Callable] = None    # (y,) -> (n, n), None = identity
    c_pos: Optional[Callable] = None   # (y, t) -> (n_pos,)
    c_vel: Optional[Callable] = None   # (y, v, u, t) -> (n_vel,)
    n_pos: int = 0
    C: Optional[Callable] = None    # (y, v, u, t) -> (n_c, n)
    force_jacobian: Optional[Callable] = None
    alg_jacobian: Optional[Callable] = None
    dh_dy: Optional[Callable] = None
    constant_mass: bool = False

    @property
    def n_vel(self):
        return self.dims.n_c - self.n_pos

    def Zv(self, y, v):
        return v if self.Z is None else self.Z(y) @ v

    def constraints(self, y, v, u, t):
        """Stacked constraint residual [c_pos; c_vel], shape (n_c,)."""
        parts = []
        if self.c_pos is not None:
            parts.append(np.atleast_1d(self.c_pos(y, t)))
        if self.c_vel is not None:
            parts.append(np.atleast_1d(self.c_vel(y, v, u, t)))
        if not parts:
            return np.zeros(0)
        return np.concatenate(parts)

    def constraint_jacobian(self, y, v, u, t):
        """Multiplier-distribution matrix C, shape (n_c, n)."""
        if self.C is None:
            return np.zeros((0, self.dims.n))
        return self.C(y, v, u, t)


def eval_output(model, y):
    """System output z = h(y)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (model.dims.n,):
        raise ValueError(f"y has shape {y.shape}, expected ({model.dims.n},)")
    return np.atleast_1d(model.h(y))


def eval_dynamics_residual(model, state, vdot, lam=None, u=None, ydot=None):
    """Stacked residual [ydot - Z v; M vdot + k - q - C^T lam - B u; c].

    ``ydot`` defaults to the kinematic value Z v (zero first block).  The
    residual vanishes exactly on solutions of the equations of motion.
    """
    dims = model.dims
    y, v, t = np.asarray(state.y, float), np.asarray(state.v, float), state.t
    vdot = np.asarray(vdot, dtype=float)
    lam = np.zeros(dims.n_c) if lam is None else np.atleast_1d(np.asarray(lam, float))
    u = np.zeros(dims.m) if u is None else np.atleast_1d(np.asarray(u, float))
    if y.shape != (dims.n,) or vdot.shape != (dims.n,):
        raise ValueError("state/vdot dimensions do not match the model")
    if lam.shape != (dims.n_c,) or u.shape != (dims.m,):
        raise ValueError("lam/u dimensions do not match the model")

    zv = model.Zv(y, v)
    kin = (zv if ydot is None else np.asarray(ydot, float)) - zv

    force = model.M(y, t) @ vdot + model.k(y, v, t) - model.q(y, v, t) - model.B(y) @ u
    if dims.n_c:
        force = force - model.constraint_jacobian(y, v, u, t).T @ lam
        cons = model.constraints(y, v, u, t)
    else:
        cons = np.zeros(0)

    res = np.concatenate([kin, force, cons])
    if not np.all(np.isfinite(res)):
        for name, block in (("kinematics", kin), ("dynamics", force), ("constraints", cons)):
            if not np.all(np.isfinite(block)):
                raise NumericFailure(name)
    return res


def linearize(rhs, point, step=1e-7):
    """Central finite-difference Jacobian of ``rhs`` at ``point``.

    Per-component step max(step, step*|x_j|).
    """
    x = np.asarray(point, dtype=float)
    f0 = np.atleast_1d(np.asarray(rhs(x), dtype=float))
    if not np.all(np.isfinite(f0)):
        raise NumericFailure("linearize", "rhs not finite at expansion point")
    J = np.empty((f0.size, x.size))
    for j in range(x.size):
        dj = max(step, step * abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += dj
        xm[j] -= dj
        J[:, j] = (np.atleast_1d(rhs(xp)) - np.atleast_1d(rhs(xm))) / (2.0 * dj)
    if not np.all(np.isfinite(J)):
        raise NumericFailure("linearize")
    return J


@dataclass(frozen=True)
class EquilibriumPoint:
    """Static solution stacked as x_eq = [y_eq, v_eq=0, lam_eq, u_eq]."""

    x_eq: np.ndarray
    dims: SystemDims

    @property
    def y(self):
        return self.x_eq[: self.dims.n]

    @property
    def v(self):
        return self.x_eq[self.dims.n : 2 * self.dims.n]

    @property
    def lam(self):
        n = self.dims.n
        return self.x_eq[2 * n : 2 * n + self.dims.n_c]

    @property
    def u(self):
        return self.x_eq[2 * self.dims.n + self.dims.n_c :]


def find_equilibrium(model, z_ref, guess, tol=1e-10, max_iter=50):
    """Newton solve of the static system at output level ``z_ref``.

    Unknowns are (y, lam, u) with v = vdot = 0; equations are the static
    force balance, the constraints and h(y) - z_ref = 0.
    """
    dims = model.dims
    z_ref = np.atleast_1d(np.asarray(z_ref, dtype=float))
    guess = np.asarray(guess, dtype=float)
    if guess.shape != (dims.x_dim,):
        raise ValueError(f"guess must have the stacked dimension {dims.x_dim}")
    if z_ref.shape != (dims.m,):
        raise ValueError(f"z_ref must have dimension {dims.m}")

    n, n_c = dims.n, dims.n_c
    w = np.concatenate([guess[:n], guess[2 * n : 2 * n + n_c], guess[2 * n + n_c :]])
    zero_v = np.zeros(n)

    def residual(wv):
        y, lam, u = wv[:n], wv[n : n + n_c], wv[n + n_c :]
        state = MbsState(y=y, v=zero_v, t=0.0)
        dyn = eval_dynamics_residual(model, state, np.zeros(n), lam, u)
        return np.concatenate([dyn[n:], np.atleast_1d(model.h(y)) - z_ref])

    history = []
    for _ in range(max_iter):
        r = residual(w)
        norm = float(np.max(np.abs(r))) if r.size else 0.0
        history.append(norm)
        if norm <= tol:
            x_eq = np.concatenate([w[:n], zero_v, w[n:]])
            return EquilibriumPoint(x_eq=x_eq, dims=dims)
        J = linearize(residual, w)
        try:
            dw = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian in equilibrium search: {exc}", history)
        w = w + dw
    raise NoConvergence(
        f"equilibrium Newton did not reach tol={tol:g} in {max_iter} iterations "
        f"(last residual {history[-1]:.3e})",
        history,
    )
