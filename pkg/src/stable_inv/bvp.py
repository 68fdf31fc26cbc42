"""Two-point boundary value problems for bounded inverse-model solutions.

The servo-constraint DAE (or an explicitly given internal-dynamics ODE) is
discretized over [T0, Tf] with Hermite-Simpson collocation:

* differential states satisfy the Simpson defect
  x_{k+1} - x_k - h/6 (f_k + 4 f_mid + f_{k+1}) against separate midpoint
  state unknowns tied to the nodes by the Hermite interpolation equation
  x_mid = (x_k + x_{k+1})/2 + h/8 (f_k - f_{k+1}),
* algebraic equations (constraints, servo rows) are enforced at every node,
  with the algebraic variables (lam, u) carried at the nodes and averaged
  into the midpoint dynamics,
* boundary rows pin eigenspace projections (original formulation) or
  selected components to the equilibrium (approximated formulation).

Counting note: with algebraic equations at all K nodes the discrete system
is square with exactly dim(state) boundary rows, which is the ODE-form
count.  The DAE-form boundary set has 2n + n_c + m rows, i.e. n_c + m more;
the scheme therefore replaces the algebraic rows of one boundary node by
the boundary block (``drop_node``).  The shipped default selections pin
enough components at T0 that the dropped rows hold identically there.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.interpolate import CubicSpline

from .mbs import NoConvergence
from .servo import unknown_layout


class SquarenessError(ValueError):
    """Assembled rows and unknowns disagree."""


class RankDeficiency(RuntimeError):
    """The collocation Jacobian factorization hit a singular pivot."""


class HyperbolicityError(RuntimeError):
    """Original boundary conditions need a hyperbolic equilibrium."""


class IntervalError(ValueError):
    """Solution comparison over an empty time overlap."""


@dataclass(frozen=True)
class Mesh:
    """Uniform collocation mesh over [T0, Tf] embedding the trajectory window."""

    T0: float
    Tf: float
    t0: float
    tf: float
    h: float

    def __post_init__(self):
        if not (self.T0 <= self.t0 < self.tf <= self.Tf):
            raise ValueError(f"need T0 <= t0 < tf <= Tf, got {self}")
        n_int = (self.Tf - self.T0) / self.h
        if abs(n_int - round(n_int)) > 1e-9 * max(1.0, n_int):
            raise ValueError(f"(Tf - T0)/h = {n_int} is not integral")

    @property
    def n_intervals(self):
        return int(round((self.Tf - self.T0) / self.h))

    @property
    def K(self):
        return self.n_intervals + 1

    @property
    def delta_t(self):
        return self.t0 - self.T0

    @property
    def nodes(self):
        return self.T0 + self.h * np.arange(self.K)

    @property
    def midpoints(self):
        return self.T0 + self.h * (np.arange(self.K - 1) + 0.5)


@dataclass(frozen=True)
class BoundaryConditions:
    """Row blocks acting on the full per-node unknown at T0 and Tf."""

    mode: str
    rows_t0: np.ndarray
    vals_t0: np.ndarray
    rows_tf: np.ndarray
    vals_tf: np.ndarray

    @property
    def n_rows(self):
        return self.rows_t0.shape[0] + self.rows_tf.shape[0]

    @property
    def dim(self):
        return self.rows_t0.shape[1]


def assemble_bc_original(eigen, eta_eq):
    """Eigenspace boundary conditions for the internal-dynamics ODE form.

    The initial deviation is confined to the unstable eigenspace (stable
    left-eigenvector rows at T0) and the final deviation to the stable one.
    """
    eta_eq = np.asarray(eta_eq, dtype=float)
    B_u = np.atleast_2d(np.asarray(eigen["B_u_ode"], dtype=float))
    B_s = np.atleast_2d(np.asarray(eigen["B_s_ode"], dtype=float))
    return BoundaryConditions(
        mode="original",
        rows_t0=B_u, vals_t0=B_u @ eta_eq,
        rows_tf=B_s, vals_tf=B_s @ eta_eq,
    )


def assemble_bc_approx(idx_t0, idx_tf, x_eq, dim, x_eq_tf=None):
    """Binary selector boundary conditions pinning components to equilibrium.

    ``idx_t0``/``idx_tf`` list the pinned component indices at T0 and Tf;
    together they must exhaust the per-node unknown dimension ``dim``.
    ``x_eq_tf`` allows a different target equilibrium at Tf (defaults to
    ``x_eq``).
    """
    idx_t0 = np.asarray(idx_t0, dtype=int)
    idx_tf = np.asarray(idx_tf, dtype=int)
    x_eq = np.asarray(x_eq, dtype=float)
    x_eq_tf = x_eq if x_eq_tf is None else np.asarray(x_eq_tf, dtype=float)
    if idx_t0.size == 0 or idx_tf.size == 0:
        raise SquarenessError("both boundary selections must be non-empty")
    if idx_t0.size + idx_tf.size != dim:
        raise SquarenessError(
            f"boundary rows must total the per-node dimension {dim}, "
            f"got {idx_t0.size} + {idx_tf.size} = {idx_t0.size + idx_tf.size}"
        )
    for name, idx in (("T0", idx_t0), ("Tf", idx_tf)):
        if idx.size != np.unique(idx).size or idx.min() < 0 or idx.max() >= dim:
            raise ValueError(f"invalid {name} selection {idx}")

    def selector(idx):
        L = np.zeros((idx.size, dim))
        L[np.arange(idx.size), idx] = 1.0
        return L

    L0, Lf = selector(idx_t0), selector(idx_tf)
    return BoundaryConditions(
        mode="approx",
        rows_t0=L0, vals_t0=x_eq[idx_t0],
        rows_tf=Lf, vals_tf=x_eq_tf[idx_tf],
    )


# ---------------------------------------------------------------------------
# point systems: uniform (f, g) interface for the collocation scheme
# ---------------------------------------------------------------------------

@dataclass
class PointEval:
    f: np.ndarray                      # (ds,) state derivative
    g: np.ndarray                      # (da,) algebraic residual
    A_s: Optional[np.ndarray] = None   # (ds, ds)
    A_a: Optional[np.ndarray] = None   # (ds, da)
    G_s: Optional[np.ndarray] = None   # (da, ds)
    G_a: Optional[np.ndarray] = None   # (da, da)


class OdePointSystem:
    """First-order ODE eta' = rhs(t, eta) with finite-difference Jacobians."""

    def __init__(self, rhs, dim, jac=None, fd_step=1e-7):
        self.rhs = rhs
        self.dim_state = dim
        self.dim_alg = 0
        self.jac = jac
        self.fd_step = fd_step

    def point(self, t, state, alg, need_jac):
        f = np.asarray(self.rhs(t, state), dtype=float)
        if not need_jac:
            return PointEval(f=f, g=np.zeros(0))
        if self.jac is not None:
            A = np.asarray(self.jac(t, state), dtype=float)
        else:
            A = np.empty((self.dim_state, self.dim_state))
            for j in range(self.dim_state):
                dj = max(self.fd_step, self.fd_step * abs(state[j]))
                sp_, sm_ = state.copy(), state.copy()
                sp_[j] += dj
                sm_[j] -= dj
                A[:, j] = (np.asarray(self.rhs(t, sp_)) - np.asarray(self.rhs(t, sm_))) / (2 * dj)
        z = np.zeros((0, 0))
        return PointEval(f=f, g=np.zeros(0), A_s=A,
                         A_a=np.zeros((self.dim_state, 0)),
                         G_s=np.zeros((0, self.dim_state)), G_a=z)


class ServoPointSystem:
    """Servo-constraint DAE as a (state, algebraic) point system.

    state = [y, v], algebraic = [lam, u]; f = [Z v, M^-1 F] with
    F = q - k + C^T lam + B u, g = [c, h(y) - z_d(t)].  Analytic model
    Jacobians are used when the model supplies them, finite differences
    otherwise.
    """

    def __init__(self, servo, fd_step=1e-7):
        self.servo = servo
        self.model = servo.model
        self.lay = unknown_layout(servo)
        dims = self.model.dims
        self.dim_state = 2 * dims.n
        self.dim_alg = dims.n_c + dims.m
        self.fd_step = fd_step
        self._mass_solve = None
        if self.model.constant_mass:
            y0 = np.zeros(dims.n)
            cho = scipy.linalg.cho_factor(self.model.M(y0, 0.0))
            self._mass_solve = lambda rhs: scipy.linalg.cho_solve(cho, rhs)
        self._analytic = (
            self.model.force_jacobian is not None
            and self.model.alg_jacobian is not None
            and self.model.dh_dy is not None
            and self.model.constant_mass
        )

    def _fg(self, t, state, alg):
        model, dims = self.model, self.model.dims
        n = dims.n
        y, v = state[:n], state[n:]
        lam, u = alg[: dims.n_c], alg[dims.n_c :]
        F = model.q(y, v, t) - model.k(y, v, t) + model.B(y) @ u
        if dims.n_c:
            F = F + model.constraint_jacobian(y, v, u, t).T @ lam
        if self._mass_solve is not None:
            vdot = self._mass_solve(F)
        else:
            vdot = np.linalg.solve(model.M(y, t), F)
        f = np.concatenate([model.Zv(y, v), vdot])
        cons = model.constraints(y, v, u, t) if dims.n_c else np.zeros(0)
        g = np.concatenate([cons, np.atleast_1d(model.h(y)) - self.servo.z_desired(t)])
        return f, g

    def point(self, t, state, alg, need_jac):
        f, g = self._fg(t, state, alg)
        if not need_jac:
            return PointEval(f=f, g=g)
        if self._analytic:
            return self._point_analytic(t, state, alg, f, g)
        return self._point_fd(t, state, alg, f, g)

    def _point_analytic(self, t, state, alg, f, g):
        model, dims = self.model, self.model.dims
        n, n_c, m = dims.n, dims.n_c, dims.m
        y, v = state[:n], state[n:]
        lam, u = alg[:n_c], alg[n_c:]
        fj = model.force_jacobian(y, v, lam, u, t)
        A_s = np.zeros((2 * n, 2 * n))
        A_a = np.zeros((2 * n, n_c + m))
        A_s[:n, n:] = np.eye(n)   # Z = identity for analytic models
        A_s[n:, :n] = self._mass_solve(fj["Fy"])
        A_s[n:, n:] = self._mass_solve(fj["Fv"])
        if n_c:
            A_a[n:, :n_c] = self._mass_solve(fj["Flam"])
        A_a[n:, n_c:] = self._mass_solve(fj["Fu"])

        G_s = np.zeros((n_c + m, 2 * n))
        G_a = np.zeros((n_c + m, n_c + m))
        if n_c:
            aj = model.alg_jacobian(y, v, u, t)
            G_s[:n_c, :n] = aj["Gy"]
            G_s[:n_c, n:] = aj["Gv"]
            G_a[:n_c, n_c:] = aj["Gu"]
        G_s[n_c:, :n] = model.dh_dy(y)
        return PointEval(f=f, g=g, A_s=A_s, A_a=A_a, G_s=G_s, G_a=G_a)

    def _point_fd(self, t, state, alg, f, g):
        ds, da = self.dim_state, self.dim_alg
        A_s = np.empty((ds, ds))
        G_s = np.empty((da, ds))
        for j in range(ds):
            dj = max(self.fd_step, self.fd_step * abs(state[j]))
            sp_, sm_ = state.copy(), state.copy()
            sp_[j] += dj
            sm_[j] -= dj
            fp, gp = self._fg(t, sp_, alg)
            fm, gm = self._fg(t, sm_, alg)
            A_s[:, j] = (fp - fm) / (2 * dj)
            G_s[:, j] = (gp - gm) / (2 * dj)
        A_a = np.empty((ds, da))
        G_a = np.empty((da, da))
        for j in range(da):
            dj = max(self.fd_step, self.fd_step * abs(alg[j]))
            ap_, am_ = alg.copy(), alg.copy()
            ap_[j] += dj
            am_[j] -= dj
            fp, gp = self._fg(t, state, ap_)
            fm, gm = self._fg(t, state, am_)
            A_a[:, j] = (fp - fm) / (2 * dj)
            G_a[:, j] = (gp - gm) / (2 * dj)
        return PointEval(f=f, g=g, A_s=A_s, A_a=A_a, G_s=G_s, G_a=G_a)


def discretize(system, mesh):
    """Wrap a servo system or point system with a collocation mesh.

    Accepts a :class:`~stable_inv.servo.ServoSystem`, an
    :class:`OdePointSystem` or any object with the point-system interface.
    """
    from .servo import ServoSystem

    if isinstance(system, ServoSystem):
        system = ServoPointSystem(system)
    return HermiteSimpson(system, mesh)


class HermiteSimpson:
    """Hermite-Simpson collocation of a (state, algebraic) point system.

    The separated form is used for the differential states: every interval
    midpoint carries its own state unknowns tied to the nodes by the Hermite
    interpolation equation, which keeps all Jacobian blocks O(h * df/dx)
    (the compressed form squares the stiffness of the beam models).

    Algebraic variables (multipliers, input) are linear per interval: they
    live at the nodes and enter the midpoint dynamics as nodal averages,
    with the algebraic equations enforced at the nodes.  A quadratic
    (node + midpoint) multiplier path would leave the Simpson quadrature
    blind to the (1, -1/2, 1) pattern and render the collocation matrix of
    index-3 servo problems structurally singular.
    """

    def __init__(self, sys, mesh):
        self.sys = sys
        self.mesh = mesh
        self.ds = sys.dim_state
        self.da = sys.dim_alg
        self.d = self.ds + self.da
        self.K = mesh.K
        self.n_unknowns = self.K * self.d + (self.K - 1) * self.ds
        self._t_nodes = mesh.nodes
        self._t_mid = mesh.midpoints

    # unknown vector layout -------------------------------------------------
    def node_slice(self, k):
        off = k * (self.d + self.ds)
        return slice(off, off + self.d)

    def mid_slice(self, k):
        off = k * (self.d + self.ds) + self.d
        return slice(off, off + self.ds)

    def split(self, z):
        """Node unknowns (K, d) and midpoint state unknowns (K-1, ds)."""
        X = np.empty((self.K, self.d))
        W = np.empty((self.K - 1, self.ds))
        for k in range(self.K):
            X[k] = z[self.node_slice(k)]
            if k < self.K - 1:
                W[k] = z[self.mid_slice(k)]
        return X, W

    def join(self, X, W):
        z = np.empty(self.n_unknowns)
        for k in range(self.K):
            z[self.node_slice(k)] = X[k]
            if k < self.K - 1:
                z[self.mid_slice(k)] = W[k]
        return z

    def constant_guess(self, x_node):
        x_node = np.asarray(x_node, dtype=float)
        X = np.tile(x_node, (self.K, 1))
        W = np.tile(x_node[: self.ds], (self.K - 1, 1))
        return self.join(X, W)

    def required_bc_rows(self, drop_node):
        return self.ds if drop_node is None else self.d


def _resolve_drop_node(problem, bc):
    """Pick which boundary node cedes its algebraic rows to the BC block."""
    if problem.da == 0 or bc.n_rows == problem.ds:
        return None
    if bc.n_rows == problem.d:
        return 0
    raise SquarenessError(
        f"boundary block has {bc.n_rows} rows; expected {problem.ds} "
        f"(keep all algebraic node rows) or {problem.d} (replace one node)"
    )


class _BoundProblem:
    """Collocation problem with boundary conditions bound; Newton callable."""

    def __init__(self, problem, bc, drop_node):
        if drop_node not in (None, 0, problem.K - 1):
            raise ValueError("drop_node must be None or a boundary node index")
        self.p = problem
        self.bc = bc
        self.drop = drop_node
        ds, da, K = problem.ds, problem.da, problem.K
        kept_node_rows = (K if drop_node is None else K - 1) * da
        n_rows = (K - 1) * 2 * ds + kept_node_rows + bc.n_rows
        if n_rows != problem.n_unknowns:
            raise SquarenessError(
                f"{n_rows} residual rows vs {problem.n_unknowns} unknowns"
            )

    def residual_and_jacobian(self, z, need_jac=True):
        p, bc = self.p, self.bc
        ds, da, d, K = p.ds, p.da, p.d, p.K
        h = p.mesh.h
        X, W = p.split(z)

        nodes = [p.sys.point(p._t_nodes[k], X[k, :ds], X[k, ds:], need_jac) for k in range(K)]
        mids = [
            p.sys.point(p._t_mid[k], W[k], 0.5 * (X[k, ds:] + X[k + 1, ds:]), need_jac)
            for k in range(K - 1)
        ]

        rows = []
        jac_entries = []  # (row0, col0, block)
        r_off = 0

        def add_block(row0, col0, block):
            if block.size:
                jac_entries.append((row0, col0, np.asarray(block)))

        if self.drop != 0 and da:
            rows.append(nodes[0].g)
            if need_jac:
                add_block(0, p.node_slice(0).start, np.hstack([nodes[0].G_s, nodes[0].G_a]))
            r_off += da

        eye = np.eye(ds)
        for k in range(K - 1):
            ek, ek1, em = nodes[k], nodes[k + 1], mids[k]
            s_k, s_k1, s_m = X[k, :ds], X[k + 1, :ds], W[k]
            keep_right = da and (k + 1) != self.drop
            # Hermite midpoint definition and Simpson defect
            middef = s_m - 0.5 * (s_k + s_k1) - (h / 8.0) * (ek.f - ek1.f)
            defect = s_k1 - s_k - (h / 6.0) * (ek.f + 4.0 * em.f + ek1.f)
            rows.append(middef)
            rows.append(defect)
            if keep_right:
                rows.append(ek1.g)

            if need_jac:
                c_k = p.node_slice(k).start
                c_m = p.mid_slice(k).start
                c_k1 = p.node_slice(k + 1).start

                # midpoint definition rows
                add_block(r_off, c_k,
                          np.hstack([-0.5 * eye - (h / 8.0) * ek.A_s, -(h / 8.0) * ek.A_a]))
                add_block(r_off, c_m, eye)
                add_block(r_off, c_k1,
                          np.hstack([-0.5 * eye + (h / 8.0) * ek1.A_s, (h / 8.0) * ek1.A_a]))
                # Simpson defect rows; midpoint algebraic values are averages
                half_mid_a = -(h / 3.0) * em.A_a
                add_block(r_off + ds, c_k,
                          np.hstack([-eye - (h / 6.0) * ek.A_s,
                                     -(h / 6.0) * ek.A_a + half_mid_a]))
                add_block(r_off + ds, c_m, -(2.0 * h / 3.0) * em.A_s)
                add_block(r_off + ds, c_k1,
                          np.hstack([eye - (h / 6.0) * ek1.A_s,
                                     -(h / 6.0) * ek1.A_a + half_mid_a]))
                if keep_right:
                    add_block(r_off + 2 * ds, c_k1, np.hstack([ek1.G_s, ek1.G_a]))
            r_off += 2 * ds + (da if keep_right else 0)

        rows.append(bc.rows_t0 @ X[0] - bc.vals_t0)
        rows.append(bc.rows_tf @ X[-1] - bc.vals_tf)
        if need_jac:
            add_block(r_off, p.node_slice(0).start, bc.rows_t0)
            add_block(r_off + bc.rows_t0.shape[0], p.node_slice(K - 1).start, bc.rows_tf)

        r = np.concatenate(rows)
        if not need_jac:
            return r, None

        n_ent = sum(b.size for _, _, b in jac_entries)
        data = np.empty(n_ent)
        ri = np.empty(n_ent, dtype=np.int64)
        ci = np.empty(n_ent, dtype=np.int64)
        pos = 0
        for row0, col0, block in jac_entries:
            nr, nc = block.shape
            idx = slice(pos, pos + block.size)
            data[idx] = block.ravel()
            ri[idx] = (row0 + np.repeat(np.arange(nr), nc))
            ci[idx] = (col0 + np.tile(np.arange(nc), nr))
            pos += block.size
        J = scipy.sparse.csc_matrix(
            (data, (ri, ci)), shape=(self.p.n_unknowns, self.p.n_unknowns)
        )
        return r, J


@dataclass
class BvpSolution:
    """Converged node/midpoint unknowns plus Newton diagnostics."""

    mesh: Mesh
    t: np.ndarray
    X: np.ndarray            # (K, ds + da) node unknowns
    W: np.ndarray            # (K - 1, ds) midpoint state unknowns
    ds: int
    da: int
    history: list = field(default_factory=list)
    final_norm: float = np.inf
    meta: dict = field(default_factory=dict)

    @property
    def states(self):
        return self.X[:, : self.ds]

    @property
    def algebraic(self):
        return self.X[:, self.ds :]

    def component(self, idx):
        return self.X[:, idx]


def solve_bvp(problem, bc, initial_guess, tol=1e-8, max_iter=100, min_step=2.0**-20):
    """Damped Newton on the collocation system.

    ``initial_guess`` may be a stacked vector, an (X, W) pair of node and
    midpoint arrays, or a single per-node vector used as a constant guess.
    """
    drop = _resolve_drop_node(problem, bc)
    bound = _BoundProblem(problem, bc, drop)

    if isinstance(initial_guess, tuple):
        z = problem.join(*initial_guess)
    else:
        guess = np.asarray(initial_guess, dtype=float)
        if guess.ndim == 1 and guess.size == problem.d:
            z = problem.constant_guess(guess)
        elif guess.shape == (problem.n_unknowns,):
            z = guess.copy()
        else:
            raise ValueError(
                f"initial guess shape {guess.shape} matches neither the stacked "
                f"dimension ({problem.n_unknowns},) nor one node ({problem.d},)"
            )

    lay = getattr(problem.sys, "lay", None)
    m_inputs = lay.m if lay is not None else 0

    def make_solution(z, history, norm):
        X, W = problem.split(z)
        return BvpSolution(
            mesh=problem.mesh, t=problem._t_nodes.copy(), X=X, W=W,
            ds=problem.ds, da=problem.da, history=history, final_norm=norm,
            meta={"bc_mode": bc.mode, "drop_node": drop, "m": m_inputs,
                  "iterations": len(history) - 1},
        )

    history = []
    r, J = bound.residual_and_jacobian(z, need_jac=True)
    norm = float(np.max(np.abs(r)))
    history.append(norm)
    for _ in range(max_iter):
        if norm <= tol:
            return make_solution(z, history, norm)
        try:
            lu = scipy.sparse.linalg.splu(J)
        except RuntimeError as exc:
            raise RankDeficiency(f"collocation Jacobian factorization failed: {exc}")
        dz = lu.solve(-r)
        if not np.all(np.isfinite(dz)):
            raise RankDeficiency("collocation Jacobian produced a non-finite step")

        step = 1.0
        while True:
            try:
                r_new, _ = bound.residual_and_jacobian(z + step * dz, need_jac=False)
                norm_new = float(np.max(np.abs(r_new)))
                if not np.isfinite(norm_new):
                    norm_new = np.inf
            except (FloatingPointError, ArithmeticError, RuntimeError, ValueError):
                norm_new = np.inf
            if norm_new <= (1.0 - 1e-4 * step) * norm:
                break
            if step <= min_step:
                if not np.isfinite(norm_new):
                    raise NoConvergence(
                        "line search could not find an evaluable step", history
                    )
                break
            step *= 0.5
        z = z + step * dz
        r, J = bound.residual_and_jacobian(z, need_jac=True)
        norm = float(np.max(np.abs(r)))
        history.append(norm)

    if norm <= tol:
        return make_solution(z, history, norm)
    raise NoConvergence(
        f"BVP Newton did not reach tol={tol:g} within {max_iter} iterations "
        f"(last residual {norm:.3e})",
        history,
    )


# ---------------------------------------------------------------------------
# post-processing
# ---------------------------------------------------------------------------

def extract_feedforward(sol):
    """Node times and input samples of a converged inverse-model solution."""
    if sol.da < 1:
        raise ValueError("solution carries no algebraic block (ODE form); "
                         "reconstruct the input from the model instead")
    m = sol.meta.get("m") or 1
    u = sol.X[:, sol.ds + sol.da - m :]
    return sol.t.copy(), u.copy()


def fit_log_rate(t, e, t_lo, t_hi, floor=1e-300):
    """Least-squares slope of ln(e) over t in [t_lo, t_hi]."""
    t = np.asarray(t, float)
    e = np.asarray(e, float)
    mask = (t >= t_lo - 1e-12) & (t <= t_hi + 1e-12) & (e > floor)
    if np.count_nonzero(mask) < 2:
        raise IntervalError(f"not enough points in [{t_lo}, {t_hi}] for a rate fit")
    return float(np.polyfit(t[mask], np.log(e[mask]), 1)[0])


def compare_solutions(sol_a, sol_b, projection=None):
    """Pointwise deviation between two solutions plus fitted boundary rates.

    ``projection`` selects components of the per-node unknown vector (index
    array); default is the full state block.  Solutions on different meshes
    are compared on the overlap of solution A's nodes via cubic
    interpolation.  The returned dict carries e(t) and log-linear rates over
    the pre-window [T0, t0] and post-window [tf, Tf] of solution A's mesh.
    """
    if projection is None:
        projection = np.arange(sol_a.ds)
    projection = np.asarray(projection, dtype=int)

    t_a = sol_a.t
    Xa = sol_a.X[:, projection]
    if sol_b.t.shape == t_a.shape and np.allclose(sol_b.t, t_a):
        Xb = sol_b.X[:, projection]
        t = t_a
    else:
        lo = max(t_a[0], sol_b.t[0])
        hi = min(t_a[-1], sol_b.t[-1])
        if not hi > lo:
            raise IntervalError(f"no overlap between [{t_a[0]}, {t_a[-1]}] "
                                f"and [{sol_b.t[0]}, {sol_b.t[-1]}]")
        mask = (t_a >= lo) & (t_a <= hi)
        t = t_a[mask]
        Xa = Xa[mask]
        Xb = np.column_stack([
            CubicSpline(sol_b.t, sol_b.X[:, j])(t) for j in projection
        ])

    e = np.linalg.norm(Xa - Xb, axis=1)
    mesh = sol_a.mesh
    out = {"t": t, "e": e, "max_e": float(np.max(e))}
    try:
        out["rate_pre"] = fit_log_rate(t, e, mesh.T0, mesh.t0)
    except IntervalError:
        out["rate_pre"] = np.nan
    try:
        out["rate_post"] = fit_log_rate(t, e, mesh.tf, mesh.Tf)
    except IntervalError:
        out["rate_post"] = np.nan
    return out
