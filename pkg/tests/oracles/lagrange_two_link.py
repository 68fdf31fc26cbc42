"""Independent symbolic Lagrange derivation of the two-link dynamics.

Everything here is derived from kinetic/potential energy with sympy and
lambdified; it shares no expressions with the package implementation and
serves as the ground truth for M, k, the internal dynamics and the
zero-dynamics Jacobian.
"""
from functools import lru_cache

import numpy as np
import sympy as sp


@lru_cache(maxsize=None)
def _symbolic():
    t = sp.Symbol("t")
    L1, L2, m1, m2, ks, dd = sp.symbols("L1 L2 m1 m2 ks dd", positive=True)
    al = sp.Function("alpha")(t)
    be = sp.Function("beta")(t)

    # Centroid kinematics of the two homogeneous rods.
    r1 = sp.Matrix([L1 / 2 * sp.cos(al), L1 / 2 * sp.sin(al)])
    r2 = sp.Matrix([
        L1 * sp.cos(al) + L2 / 2 * sp.cos(al + be),
        L1 * sp.sin(al) + L2 / 2 * sp.sin(al + be),
    ])
    I1 = m1 * L1**2 / 12
    I2 = m2 * L2**2 / 12
    v1 = r1.diff(t)
    v2 = r2.diff(t)
    T = (
        m1 / 2 * (v1.T @ v1)[0, 0]
        + I1 / 2 * al.diff(t) ** 2
        + m2 / 2 * (v2.T @ v2)[0, 0]
        + I2 / 2 * (al.diff(t) + be.diff(t)) ** 2
    )
    U = ks / 2 * be**2

    qs = [al, be]
    Qnc = [sp.Integer(0), -dd * be.diff(t)]  # damper, non-conservative
    eqs = []
    for qi, Qi in zip(qs, Qnc):
        Li = sp.diff(sp.diff(T, qi.diff(t)), t) - sp.diff(T, qi) + sp.diff(U, qi) - Qi
        eqs.append(sp.simplify(Li))

    # Substitute plain symbols for the functions and their derivatives.
    a_, b_, ad_, bd_, add_, bdd_ = sp.symbols("a_ b_ ad_ bd_ add_ bdd_")
    subs = {
        al.diff(t, 2): add_, be.diff(t, 2): bdd_,
        al.diff(t): ad_, be.diff(t): bd_,
        al: a_, be: b_,
    }
    eqs = [e.subs(subs) for e in eqs]

    params = (L1, L2, m1, m2, ks, dd)
    coords = (a_, b_, ad_, bd_, add_, bdd_)
    return params, coords, eqs


@lru_cache(maxsize=None)
def _lambdified():
    params, coords, eqs = _symbolic()
    a_, b_, ad_, bd_, add_, bdd_ = coords
    vec = sp.Matrix(eqs)
    Mmat = vec.jacobian(sp.Matrix([add_, bdd_]))
    rest = sp.expand(vec - Mmat @ sp.Matrix([add_, bdd_]))
    args = params + coords
    f_M = sp.lambdify(args, Mmat, "numpy")
    f_rest = sp.lambdify(args, rest, "numpy")
    return f_M, f_rest


def _args(p, y, v, vdot=(0.0, 0.0)):
    return (p.L1, p.L2, p.m1, p.m2, p.k, p.d, y[0], y[1], v[0], v[1], vdot[0], vdot[1])


def oracle_mass_matrix(p, y):
    f_M, _ = _lambdified()
    return np.array(f_M(*_args(p, y, (0.0, 0.0))), dtype=float)


def oracle_residual(p, y, v, vdot, u):
    """Residual of the Lagrange equations: M vdot + rest(y, v) - [u, 0]."""
    f_M, f_rest = _lambdified()
    M = np.array(f_M(*_args(p, y, v)), dtype=float)
    rest = np.array(f_rest(*_args(p, y, v)), dtype=float).ravel()
    return M @ np.asarray(vdot, float) + rest - np.array([u, 0.0])

def oracle_coriolis_minus_applied(p, y, v):
    """The k - q part: residual with vdot = 0 and u = 0."""
    return oracle_residual(p, y, v, (0.0, 0.0), 0.0)


def oracle_beta_ddot(p, z, zdot, zddot, beta, beta_dot):
    """Solve the passive-joint Lagrange equation for beta'' on the output manifold."""
    y = (z - beta / 2.0, beta)
    v = (zdot - beta_dot / 2.0, beta_dot)
    f_M, f_rest = _lambdified()
    M = np.array(f_M(*_args(p, y, v)), dtype=float)
    rest = np.array(f_rest(*_args(p, y, v)), dtype=float).ravel()
    # Row 2 with alpha'' = zddot - beta''/2:
    #   M21 (zddot - bdd/2) + M22 bdd + rest2 = 0
    coeff = M[1, 1] - M[1, 0] / 2.0
    return -(M[1, 0] * zddot + rest[1]) / coeff


def oracle_zero_dynamics_jacobian(p):
    """Analytic Jacobian of the zero dynamics at the origin."""
    be, bd = sp.symbols("be bd", real=True)
    L1, L2, m1, m2, ks, dd = sp.symbols("L1 L2 m1 m2 ks dd", positive=True)
    params, coords, eqs = _symbolic()
    a_, b_, ad_, bd_, add_, bdd_ = coords
    eq2 = eqs[1].subs({a_: -b_ / 2, ad_: -bd_ / 2, add_: -bdd_ / 2})
    bdd_expr = sp.solve(eq2, bdd_)[0]
    J = sp.Matrix([[sp.Integer(0), sp.Integer(1)],
                   [sp.diff(bdd_expr, b_), sp.diff(bdd_expr, bd_)]])
    J0 = J.subs({b_: 0, bd_: 0})
    f = sp.lambdify(params, J0, "numpy")
    return np.array(f(p.L1, p.L2, p.m1, p.m2, p.k, p.d), dtype=float)
