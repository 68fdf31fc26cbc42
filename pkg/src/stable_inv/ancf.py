"""Planar shear-deformable nodal-coordinate beam element and its assembly.

Each node carries six coordinates: the position (r1, r2) plus the two
position-gradient vectors d r/dx and d r/dy, so an N-element beam has
6(N+1) global coordinates with shared interior nodes.  Elastic forces come
from the Green-Lagrange strain with a Saint-Venant-Kirchhoff material; the
volume integrals reduce to contractions with constant Gauss-point invariant
matrices (the quadrature order is exact for the polynomial integrands), so
no integral is evaluated at runtime and the force Jacobian is analytic.

The left node is pinned to the origin and driven by a velocity-controlled
actuator prescribing the rotation rate of its cross-section; the output is
the angle of the end-node position vector.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .mbs import SystemDims, SystemModel

# 5-point rule along the axis (exact to degree 9; invariant products reach 8)
# and 3-point through the thickness (exact to degree 5; products reach 4).
_N_GAUSS_X = 5
_N_GAUSS_Y = 3


class SingularCrossSection(RuntimeError):
    """Cross-section slope vector vanished at the actuated node."""


class UndefinedOutputAngle(RuntimeError):
    """End node sits at the origin; its direction angle is undefined."""


@dataclass(frozen=True)
class AncfMaterial:
    """Density, Young's modulus and Poisson ratio."""

    rho: float = 910.0
    E: float = 1.2e7
    nu: float = 0.0

    def __post_init__(self):
        if self.rho <= 0.0 or self.E <= 0.0 or not 0.0 <= self.nu < 0.5:
            raise ValueError(f"invalid material {self}")

    @property
    def lame(self):
        lam = self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
        mu = self.E / (2.0 * (1.0 + self.nu))
        return lam, mu


@dataclass(frozen=True)
class AncfGeometry:
    """Total length, cross-section area and element count (square section)."""

    L_total: float = 1.0
    A: float = 0.0081
    N: int = 4

    def __post_init__(self):
        if self.L_total <= 0.0 or self.A <= 0.0 or self.N < 1:
            raise ValueError(f"invalid geometry {self}")

    @property
    def L_e(self):
        return self.L_total / self.N

    @property
    def width(self):
        """Side of the square cross-section."""
        return float(np.sqrt(self.A))

    @property
    def n_coords(self):
        return 6 * (self.N + 1)


def shape_functions(xi, eta_hat, L_e):
    """Shape values s1..s6 and the 2x12 interpolation matrix at (xi, eta_hat)."""
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi = {xi} outside [0, 1]")
    s = np.array([
        1.0 - 3.0 * xi**2 + 2.0 * xi**3,
        L_e * (xi - 2.0 * xi**2 + xi**3),
        L_e * (eta_hat - xi * eta_hat),
        3.0 * xi**2 - 2.0 * xi**3,
        L_e * (-(xi**2) + xi**3),
        L_e * xi * eta_hat,
    ])
    return s, _interp_matrix(s)


def _interp_matrix(row):
    S = np.zeros((2, 12))
    S[0, 0::2] = row
    S[1, 1::2] = row
    return S


def _shape_dx(xi, eta_hat, L_e):
    return np.array([
        (-6.0 * xi + 6.0 * xi**2) / L_e,
        1.0 - 4.0 * xi + 3.0 * xi**2,
        -eta_hat,
        (6.0 * xi - 6.0 * xi**2) / L_e,
        -2.0 * xi + 3.0 * xi**2,
        eta_hat,
    ])


def _shape_dy(xi, eta_hat, L_e):
    return np.array([0.0, 0.0, 1.0 - xi, 0.0, 0.0, xi])


def _gauss_points(L_e, width):
    """Gauss grid over one element volume; weights include the z width."""
    xg, wx = np.polynomial.legendre.leggauss(_N_GAUSS_X)
    yg, wy = np.polynomial.legendre.leggauss(_N_GAUSS_Y)
    xs = 0.5 * L_e * (xg + 1.0)
    ws_x = 0.5 * L_e * wx
    ys = 0.5 * width * yg
    ws_y = 0.5 * width * wy
    pts, wts = [], []
    for x, wxi in zip(xs, ws_x):
        for y, wyi in zip(ys, ws_y):
            pts.append((x, y))
            wts.append(wxi * wyi * width)
    return pts, np.array(wts)


def build_strain_invariants(L_e, width):
    """Constant Gauss-point matrices for the quadratic strain measures.

    Returns (axx, ayy, axy, w) with a/b/c-type strain scalars given by
    e^T axx e etc.; axy is symmetrized so gradients are 2 axy e.
    """
    pts, w = _gauss_points(L_e, width)
    G = len(pts)
    axx = np.empty((G, 12, 12))
    ayy = np.empty((G, 12, 12))
    axy = np.empty((G, 12, 12))
    for g, (x, y) in enumerate(pts):
        xi, eh = x / L_e, y / L_e
        Sx = _interp_matrix(_shape_dx(xi, eh, L_e))
        Sy = _interp_matrix(_shape_dy(xi, eh, L_e))
        axx[g] = Sx.T @ Sx
        ayy[g] = Sy.T @ Sy
        axy[g] = 0.5 * (Sx.T @ Sy + Sy.T @ Sx)
    return axx, ayy, axy, w


def element_mass_matrix(material, geometry):
    """Constant 12x12 element mass matrix (exact Gauss volume integral)."""
    L_e, width = geometry.L_e, geometry.width
    pts, w = _gauss_points(L_e, width)
    G6 = np.zeros((6, 6))
    for (x, y), wg in zip(pts, w):
        row = shape_functions(x / L_e, y / L_e, L_e)[0]
        G6 += material.rho * wg * np.outer(row, row)
    return np.kron(G6, np.eye(2))


def straight_coords(geometry, theta=0.0):
    """Nodal coordinates of the undeformed beam rotated by ``theta`` about the pin."""
    ct, st = np.cos(theta), np.sin(theta)
    e = np.empty(geometry.n_coords)
    for node in range(geometry.N + 1):
        xn = node * geometry.L_e
        e[6 * node : 6 * node + 6] = (xn * ct, xn * st, ct, st, -st, ct)
    return e


def pin_constraint(e):
    """Position residual of the pinned left node, (e1, e2)."""
    return np.asarray(e, dtype=float)[:2].copy()


def actuator_constraint(e, edot, u):
    """Velocity-actuator residual u - gamma_dot at the left node.

    gamma = atan2(e6, e5) is the cross-section angle, so the residual reads
    u + (e6 e5' - e5 e6') / (e5^2 + e6^2).
    """
    e = np.asarray(e, dtype=float)
    edot = np.asarray(edot, dtype=float)
    f56sq = e[4] ** 2 + e[5] ** 2
    if f56sq < 1e-14:
        raise SingularCrossSection("slope vector (e5, e6) vanished at the actuated node")
    return float(u) + (e[5] * edot[4] - e[4] * edot[5]) / f56sq


def output_angle(e, N):
    """Angle of the end-node position vector against the horizontal."""
    e = np.asarray(e, dtype=float)
    D = 6 * (N + 1)
    if e.shape != (D,):
        raise ValueError(f"expected {D} coordinates for N={N}, got {e.shape}")
    px, py = e[D - 6], e[D - 5]
    if px**2 + py**2 < 1e-14:
        raise UndefinedOutputAngle("end node at the origin")
    return float(np.arctan2(py, px))


class AncfAssembly:
    """Precomputed invariants and scatter maps for an N-element beam."""

    def __init__(self, material, geometry):
        self.material = material
        self.geometry = geometry
        self.n = geometry.n_coords
        self.axx, self.ayy, self.axy, self.w = build_strain_invariants(
            geometry.L_e, geometry.width
        )
        self.lam, self.mu = material.lame
        self.element_dofs = np.array(
            [np.arange(6 * el, 6 * el + 12) for el in range(geometry.N)]
        )

    @cached_property
    def mass_matrix(self):
        M_el = element_mass_matrix(self.material, self.geometry)
        M = np.zeros((self.n, self.n))
        for dofs in self.element_dofs:
            M[np.ix_(dofs, dofs)] += M_el
        return M

    def _gather(self, e):
        return np.ascontiguousarray(np.asarray(e, dtype=float)[self.element_dofs])

    def strain_energy(self, e):
        U, _, _ = kernels.elastic_batch(
            self.axx, self.ayy, self.axy, self.w, self.lam, self.mu,
            self._gather(e), need_tangent=False,
        )
        return float(np.sum(U))

    def elastic_forces(self, e, need_tangent=True):
        """Global elastic force and (optionally) its Jacobian dq/de."""
        _, q_el, K_el = kernels.elastic_batch(
            self.axx, self.ayy, self.axy, self.w, self.lam, self.mu,
            self._gather(e), need_tangent=need_tangent,
        )
        q = np.zeros(self.n)
        for dofs, qe in zip(self.element_dofs, q_el):
            q[dofs] += qe
        if not need_tangent:
            return q, None
        K = np.zeros((self.n, self.n))
        for dofs, Ke in zip(self.element_dofs, K_el):
            K[np.ix_(dofs, dofs)] += Ke
        return q, K


def elastic_forces(assembly, e):
    """Elastic force and analytic tangent for global coordinates ``e``."""
    return assembly.elastic_forces(e, need_tangent=True)


def assemble_system(material, geometry):
    """Bundle the N-element beam as a constrained :class:`SystemModel`.

    n = 6(N+1) coordinates, n_c = 3 constraints (two pin rows at position
    level, one actuator row at velocity level carrying the input) and one
    output.  The input does not enter the force balance (B = 0).
    """
    asm = AncfAssembly(material, geometry)
    n = asm.n
    dims = SystemDims(n=n, n_c=3, m=1)
    M_glob = asm.mass_matrix
    ix, iy = n - 6, n - 5   # end-node position dofs

    def M(y, t):
        return M_glob

    def k(y, v, t):
        return np.zeros(n)

    def q(y, v, t):
        return asm.elastic_forces(y, need_tangent=False)[0]

    def B(y):
        return np.zeros((n, 1))

    def h(y):
        return np.array([output_angle(y, geometry.N)])

    def c_pos(y, t):
        return pin_constraint(y)

    def c_vel(y, v, u, t):
        return np.array([actuator_constraint(y, v, np.atleast_1d(u)[0])])

    def C(y, v, u, t):
        f56sq = y[4] ** 2 + y[5] ** 2
        if f56sq < 1e-14:
            raise SingularCrossSection("slope vector (e5, e6) vanished at the actuated node")
        out = np.zeros((3, n))
        out[0, 0] = 1.0
        out[1, 1] = 1.0
        out[2, 4] = y[5] / f56sq
        out[2, 5] = -y[4] / f56sq
        return out

    def force_jacobian(y, v, lam, u, t):
        _, Kt = asm.elastic_forces(y, need_tangent=True)
        Fy = Kt.copy()
        # The actuator row of C depends on (e5, e6); its multiplier force
        # C^T lam therefore contributes to dF/dy.
        e5, e6 = y[4], y[5]
        f56sq = e5**2 + e6**2
        lam2 = lam[2]
        s = lam2 / f56sq**2
        Fy[4, 4] += -2.0 * e5 * e6 * s
        Fy[4, 5] += (f56sq - 2.0 * e6**2) * s
        Fy[5, 4] += (2.0 * e5**2 - f56sq) * s
        Fy[5, 5] += 2.0 * e5 * e6 * s
        return {
            "Fy": Fy,
            "Fv": np.zeros((n, n)),
            "Flam": C(y, v, u, t).T,
            "Fu": np.zeros((n, 1)),
        }

    def alg_jacobian(y, v, u, t):
        e5, e6 = y[4], y[5]
        f56sq = e5**2 + e6**2
        num = e6 * v[4] - e5 * v[5]
        Gy = np.zeros((3, n))
        Gy[0, 0] = 1.0
        Gy[1, 1] = 1.0
        Gy[2, 4] = (-v[5] * f56sq - 2.0 * e5 * num) / f56sq**2
        Gy[2, 5] = (v[4] * f56sq - 2.0 * e6 * num) / f56sq**2
        Gv = np.zeros((3, n))
        Gv[2, 4] = e6 / f56sq
        Gv[2, 5] = -e5 / f56sq
        Gu = np.array([[0.0], [0.0], [1.0]])
        return {"Gy": Gy, "Gv": Gv, "Gu": Gu}

    def dh_dy(y):
        px, py = y[ix], y[iy]
        r2 = px**2 + py**2
        out = np.zeros((1, n))
        out[0, ix] = -py / r2
        out[0, iy] = px / r2
        return out

    model = SystemModel(
        dims=dims,
        M=M, k=k, q=q, B=B, h=h,
        c_pos=c_pos, c_vel=c_vel, n_pos=2, C=C,
        force_jacobian=force_jacobian,
        alg_jacobian=alg_jacobian,
        dh_dy=dh_dy,
        constant_mass=True,
    )
    return model, asm
