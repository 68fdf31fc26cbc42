"""NumPy reference implementation of the ANCF elastic-force kernel.

Evaluates strain energy, elastic force and (optionally) the analytic tangent
for a batch of element coordinate vectors, given the precomputed Gauss-point
invariant matrices.  Semantics are identical to the compiled kernel.
"""
import numpy as np


def elastic_batch(axx, ayy, axy, w, lam, mu, ebatch, need_tangent=True):
    """Batched element energy/force/tangent.

    Parameters
    ----------
    axx, ayy, axy : (G, 12, 12) symmetric Gauss-point matrices
    w : (G,) quadrature weights (volume measure included)
    lam, mu : Lame constants
    ebatch : (B, 12) element coordinate vectors
    need_tangent : skip the Hessian when False

    Returns
    -------
    U : (B,) strain energies
    q : (B, 12) elastic forces (negative energy gradient)
    K : (B, 12, 12) force Jacobians dq/de, or None
    """
    e = np.asarray(ebatch, dtype=float)
    ax = np.einsum("gij,bj->bgi", axx, e)
    ay = np.einsum("gij,bj->bgi", ayy, e)
    az = np.einsum("gij,bj->bgi", axy, e)
    sa = np.einsum("bgi,bi->bg", ax, e) - 1.0   # 2 E11
    sb = np.einsum("bgi,bi->bg", ay, e) - 1.0   # 2 E22
    sc = np.einsum("bgi,bi->bg", az, e)         # 2 E12

    dens = 0.125 * lam * (sa + sb) ** 2 + 0.25 * mu * (sa**2 + sb**2 + 2.0 * sc**2)
    U = dens @ w

    grad = (
        (0.5 * lam * (sa + sb))[..., None] * (ax + ay)
        + mu * (sa[..., None] * ax + sb[..., None] * ay + 2.0 * sc[..., None] * az)
    )
    q = -np.einsum("bgi,g->bi", grad, w)

    K = None
    if need_tangent:
        p = ax + ay
        H = lam * np.einsum("bgi,bgj,g->bij", p, p, w)
        H += 2.0 * mu * np.einsum("bgi,bgj,g->bij", ax, ax, w)
        H += 2.0 * mu * np.einsum("bgi,bgj,g->bij", ay, ay, w)
        H += 4.0 * mu * np.einsum("bgi,bgj,g->bij", az, az, w)
        H += 0.5 * lam * np.einsum("bg,g,gij->bij", sa + sb, w, axx + ayy)
        H += mu * np.einsum("bg,g,gij->bij", sa, w, axx)
        H += mu * np.einsum("bg,g,gij->bij", sb, w, ayy)
        H += 2.0 * mu * np.einsum("bg,g,gij->bij", sc, w, axy)
        K = -H
    return U, q, K
