"""Two-link manipulator with an actuated shoulder and a passive elbow.

Both links are homogeneous slender rods in a horizontal plane (no gravity).
Minimal coordinates are the absolute shoulder angle ``alpha`` and the
relative elbow angle ``beta``; the elbow carries a linear spring-damper.
The output is the angle of the end-effector position vector, which for
equal link lengths reduces to z = alpha + beta/2.

With the abbreviations

    a = (m1/3 + m2) L1^2,  b = m2 L2^2 / 3,  c = m2 L1 L2,

the mass matrix and the quadratic-velocity vector are

    M = [[a + b + c cos(beta), b + c/2 cos(beta)],
         [b + c/2 cos(beta),   b]]
    k = [-c sin(beta) (alpha' beta' + beta'^2 / 2),
          c/2 sin(beta) alpha'^2]

and the applied forces are q = [0, -k_spring beta - d beta'] with the input
torque entering through B = [1, 0]^T.  These expressions are checked against
an independent symbolic Lagrange derivation in the test suite.
"""
from dataclasses import dataclass

import numpy as np

from .mbs import SystemDims, SystemModel, linearize


class SingularConfiguration(RuntimeError):
    """Internal-dynamics elimination hit a singular configuration."""


class NonHyperbolicSpectrum(RuntimeError):
    """Zero-dynamics linearization has eigenvalues on the imaginary axis."""


@dataclass(frozen=True)
class TwoLinkParams:
    """Link lengths/masses plus elbow spring-damper coefficients."""

    L1: float = 0.5
    L2: float = 0.5
    m1: float = 0.05
    m2: float = 0.05
    k: float = 0.5
    d: float = 2.5e-5

    def __post_init__(self):
        if min(self.L1, self.L2, self.m1, self.m2, self.k) <= 0.0 or self.d < 0.0:
            raise ValueError(f"invalid two-link parameters {self}")

    @property
    def inertia_coeffs(self):
        a = (self.m1 / 3.0 + self.m2) * self.L1**2
        b = self.m2 * self.L2**2 / 3.0
        c = self.m2 * self.L1 * self.L2
        return a, b, c


def end_effector(params, alpha, beta):
    x = params.L1 * np.cos(alpha) + params.L2 * np.cos(alpha + beta)
    y = params.L1 * np.sin(alpha) + params.L2 * np.sin(alpha + beta)
    return x, y


def build_two_link_model(params):
    """Assemble the minimal-coordinate :class:`SystemModel` (n=2, n_c=0, m=1)."""
    a, b, c = params.inertia_coeffs
    ks, d = params.k, params.d

    def M(y, t):
        cb = np.cos(y[1])
        m12 = b + 0.5 * c * cb
        return np.array([[a + b + c * cb, m12], [m12, b]])

    def k(y, v, t):
        sb = np.sin(y[1])
        ad, bd = v
        return np.array([-c * sb * (ad * bd + 0.5 * bd**2), 0.5 * c * sb * ad**2])

    def q(y, v, t):
        return np.array([0.0, -ks * y[1] - d * v[1]])

    def B(y):
        return np.array([[1.0], [0.0]])

    def h(y):
        px, py = end_effector(params, y[0], y[1])
        return np.array([np.arctan2(py, px)])

    return SystemModel(
        dims=SystemDims(n=2, n_c=0, m=1),
        M=M, k=k, q=q, B=B, h=h,
    )


def _beta_ddot(params, z, zdot, zddot, beta, beta_dot):
    """Elbow acceleration on the output manifold (requires L1 == L2)."""
    if abs(params.L1 - params.L2) > 1e-12 * max(params.L1, params.L2):
        raise ValueError("internal dynamics elimination assumes L1 == L2")
    a, b, c = params.inertia_coeffs
    cb, sb = np.cos(beta), np.sin(beta)
    denom = 0.5 * b - 0.25 * c * cb
    if abs(denom) < 1e-12 * (abs(b) + abs(c)):
        raise SingularConfiguration(
            f"passive-joint elimination singular at beta={beta!r} (cos beta = 2b/c)"
        )
    alpha_dot = zdot - 0.5 * beta_dot
    num = (
        -(b + 0.5 * c * cb) * zddot
        - 0.5 * c * sb * alpha_dot**2
        - params.k * beta
        - params.d * beta_dot
    )
    return num / denom


def internal_dynamics_rhs(params, z, zdot, zddot, eta):
    """Right-hand side of the internal dynamics eta' = [beta', beta''].

    The actuated coordinate is eliminated through alpha = z - beta/2 and the
    passive-joint equation is solved for beta''.
    """
    beta, beta_dot = eta
    if abs(beta) >= np.pi:
        raise SingularConfiguration(f"|beta| = {abs(beta):.3f} >= pi")
    return np.array([beta_dot, _beta_ddot(params, z, zdot, zddot, beta, beta_dot)])


def zero_dynamics_eigen(params):
    """Eigen-structure of the zero dynamics linearized at eta = 0.

    Returns a dict with the stable/unstable eigenvalues and the 1x2 boundary
    rows.  ``B_u_ode`` annihilates the unstable eigenvector: deviations along
    the unstable eigenline satisfy B_u (eta - eta_eq) = 0 identically while
    stable components are forbidden, which confines the start of the
    trajectory to the unstable eigenspace.  ``B_s_ode`` annihilates the
    stable eigenvector and confines the final deviation to it.
    """
    A = linearize(lambda eta: internal_dynamics_rhs(params, 0.0, 0.0, 0.0, eta), np.zeros(2))
    eigvals, eigvecs = np.linalg.eig(A)
    if np.any(np.abs(eigvals.real) < 1e-9 * max(1.0, np.max(np.abs(eigvals)))):
        raise NonHyperbolicSpectrum(f"eigenvalues {eigvals} too close to the imaginary axis")
    if np.any(np.abs(eigvals.imag) > 1e-9 * np.max(np.abs(eigvals))):
        raise NonHyperbolicSpectrum(f"complex zero-dynamics spectrum {eigvals}")
    eigvals = eigvals.real
    eigvecs = eigvecs.real
    i_s = int(np.argmin(eigvals))
    i_u = int(np.argmax(eigvals))
    v_s, v_u = eigvecs[:, i_s], eigvecs[:, i_u]

    def perp_row(vec):
        row = np.array([vec[1], -vec[0]])
        return row / np.linalg.norm(row)

    return {
        "lambda_s": float(eigvals[i_s]),
        "lambda_u": float(eigvals[i_u]),
        "v_s": v_s / np.linalg.norm(v_s),
        "v_u": v_u / np.linalg.norm(v_u),
        "B_u_ode": perp_row(v_u)[None, :],
        "B_s_ode": perp_row(v_s)[None, :],
        "A": A,
    }


def reconstruct_input(params, z, zdot, zddot, eta_traj):
    """Recover the shoulder torque and angle from the output and elbow states.

    All arguments are arrays over a common time grid; ``eta_traj`` has shape
    (npts, 2).  Returns (u, alpha) arrays.
    """
    z = np.atleast_1d(np.asarray(z, float))
    zdot = np.atleast_1d(np.asarray(zdot, float))
    zddot = np.atleast_1d(np.asarray(zddot, float))
    eta_traj = np.asarray(eta_traj, float).reshape(-1, 2)
    a, b, c = params.inertia_coeffs

    u = np.empty(z.size)
    alpha = np.empty(z.size)
    for i in range(z.size):
        beta, beta_dot = eta_traj[i]
        bdd = _beta_ddot(params, z[i], zdot[i], zddot[i], beta, beta_dot)
        alpha[i] = z[i] - 0.5 * beta
        alpha_dot = zdot[i] - 0.5 * beta_dot
        alpha_ddot = zddot[i] - 0.5 * bdd
        cb, sb = np.cos(beta), np.sin(beta)
        m11 = a + b + c * cb
        m12 = b + 0.5 * c * cb
        k1 = -c * sb * (alpha_dot * beta_dot + 0.5 * beta_dot**2)
        u[i] = m11 * alpha_ddot + m12 * bdd + k1
    return u, alpha
