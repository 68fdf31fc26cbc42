"""Brute-force quadrature oracles for the ANCF beam element.

These rebuild the shape functions from their definitions and integrate the
mass matrix and the Green-Lagrange strain energy by dense numerical
quadrature, independently of the invariant-based runtime path.
"""
import numpy as np


def shape_row(xi, eta_hat, L_e):
    """The six scalar shape functions at (xi, eta_hat) = (x/L_e, y/L_e)."""
    return np.array([
        1.0 - 3.0 * xi**2 + 2.0 * xi**3,
        L_e * (xi - 2.0 * xi**2 + xi**3),
        L_e * (eta_hat - xi * eta_hat),
        3.0 * xi**2 - 2.0 * xi**3,
        L_e * (-(xi**2) + xi**3),
        L_e * xi * eta_hat,
    ])


def shape_row_dx(xi, eta_hat, L_e):
    """d s_i / d x (physical derivative)."""
    return np.array([
        (-6.0 * xi + 6.0 * xi**2) / L_e,
        1.0 - 4.0 * xi + 3.0 * xi**2,
        -eta_hat,
        (6.0 * xi - 6.0 * xi**2) / L_e,
        -2.0 * xi + 3.0 * xi**2,
        eta_hat,
    ])


def shape_row_dy(xi, eta_hat, L_e):
    """d s_i / d y (physical derivative)."""
    return np.array([0.0, 0.0, 1.0 - xi, 0.0, 0.0, xi])


def _expand(row):
    """2x12 interpolation matrix in the alternating dof layout."""
    S = np.zeros((2, 12))
    S[0, 0::2] = row
    S[1, 1::2] = row
    return S


def oracle_element_mass_matrix(rho, L_e, width, n_cells=50):
    """Dense composite-quadrature volume integral of rho * S^T S.

    ``n_cells`` cells per axis with a 3-point Gauss rule per cell; the
    integrand is independent of the out-of-plane coordinate z, so the exact
    z-sum contributes the factor ``width``.
    """
    gp = np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
    gw = np.array([5.0, 8.0, 5.0]) / 9.0

    def axis(lo, hi):
        edges = np.linspace(lo, hi, n_cells + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        pts = (mid[:, None] + half[:, None] * gp[None, :]).ravel()
        wts = (half[:, None] * gw[None, :]).ravel()
        return pts, wts

    xs, wx = axis(0.0, L_e)
    ys, wy = axis(-width / 2.0, width / 2.0)
    M = np.zeros((12, 12))
    for x, wxi in zip(xs, wx):
        for y, wyi in zip(ys, wy):
            S = _expand(shape_row(x / L_e, y / L_e, L_e))
            M += rho * wxi * wyi * width * (S.T @ S)
    return M


def oracle_element_strain_energy(E, nu, L_e, width, e, n_x=12, n_y=6):
    """Green-Lagrange / Saint-Venant-Kirchhoff strain energy of one element.

    Computed directly from the deformation gradient F = [dr/dx, dr/dy] at
    Gauss points (n_x by n_y, exact for the polynomial integrand).
    """
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)) if nu != 0.0 else 0.0
    mu = E / (2.0 * (1.0 + nu))
    xg, wxg = np.polynomial.legendre.leggauss(n_x)
    yg, wyg = np.polynomial.legendre.leggauss(n_y)
    xs = 0.5 * L_e * (xg + 1.0)
    wx = 0.5 * L_e * wxg
    ys = 0.5 * width * yg
    wy = 0.5 * width * wyg

    e = np.asarray(e, dtype=float)
    U = 0.0
    for x, wxi in zip(xs, wx):
        for y, wyi in zip(ys, wy):
            xi, eh = x / L_e, y / L_e
            Sx = _expand(shape_row_dx(xi, eh, L_e))
            Sy = _expand(shape_row_dy(xi, eh, L_e))
            F = np.column_stack([Sx @ e, Sy @ e])
            Egl = 0.5 * (F.T @ F - np.eye(2))
            dens = 0.5 * lam * np.trace(Egl) ** 2 + mu * np.sum(Egl * Egl)
            U += wxi * wyi * width * dens
    return U


def oracle_element_force_fd(E, nu, L_e, width, e, step=1e-6):
    """Elastic force as minus the central finite difference of the energy."""
    e = np.asarray(e, dtype=float)
    q = np.empty(12)
    for j in range(12):
        h = step * max(1.0, abs(e[j]))
        ep, em = e.copy(), e.copy()
        ep[j] += h
        em[j] -= h
        Up = oracle_element_strain_energy(E, nu, L_e, width, ep)
        Um = oracle_element_strain_energy(E, nu, L_e, width, em)
        q[j] = -(Up - Um) / (2.0 * h)
    return q
