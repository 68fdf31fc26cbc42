# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled ANCF elastic-force kernel.

Same contract as stable_inv._kernels_py.elastic_batch; plain C loops over
the batch and the Gauss points.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def elastic_batch(double[:, :, ::1] axx, double[:, :, ::1] ayy,
                  double[:, :, ::1] axy, double[::1] w,
                  double lam, double mu,
                  double[:, ::1] ebatch, bint need_tangent=True):
    cdef Py_ssize_t B = ebatch.shape[0]
    cdef Py_ssize_t G = w.shape[0]
    cdef Py_ssize_t b, g, i, j

    U_np = np.zeros(B)
    q_np = np.zeros((B, 12))
    K_np = np.zeros((B, 12, 12)) if need_tangent else None

    cdef double[::1] U = U_np
    cdef double[:, ::1] q = q_np
    cdef double[:, :, ::1] K = K_np if need_tangent else np.zeros((1, 12, 12))

    cdef double ax[12]
    cdef double ay[12]
    cdef double az[12]
    cdef double pi, pj
    cdef double sa, sb, sc, wg, ei
    cdef double ca, cxx, cyy, cxy, cp

    for b in range(B):
        for g in range(G):
            sa = 0.0
            sb = 0.0
            sc = 0.0
            for i in range(12):
                ax[i] = 0.0
                ay[i] = 0.0
                az[i] = 0.0
                for j in range(12):
                    ei = ebatch[b, j]
                    ax[i] += axx[g, i, j] * ei
                    ay[i] += ayy[g, i, j] * ei
                    az[i] += axy[g, i, j] * ei
                ei = ebatch[b, i]
                sa += ax[i] * ei
                sb += ay[i] * ei
                sc += az[i] * ei
            sa -= 1.0
            sb -= 1.0
            wg = w[g]

            U[b] += wg * (0.125 * lam * (sa + sb) * (sa + sb)
                          + 0.25 * mu * (sa * sa + sb * sb + 2.0 * sc * sc))

            ca = 0.5 * lam * (sa + sb)
            for i in range(12):
                q[b, i] -= wg * (ca * (ax[i] + ay[i])
                                 + mu * (sa * ax[i] + sb * ay[i] + 2.0 * sc * az[i]))

            if need_tangent:
                cp = wg * lam
                cxx = wg * (0.5 * lam * (sa + sb) + mu * sa)
                cyy = wg * (0.5 * lam * (sa + sb) + mu * sb)
                cxy = wg * 2.0 * mu * sc
                for i in range(12):
                    pi = ax[i] + ay[i]
                    for j in range(12):
                        pj = ax[j] + ay[j]
                        K[b, i, j] -= (cp * pi * pj
                                       + wg * 2.0 * mu * (ax[i] * ax[j] + ay[i] * ay[j]
                                                          + 2.0 * az[i] * az[j])
                                       + cxx * axx[g, i, j] + cyy * ayy[g, i, j]
                                       + cxy * axy[g, i, j])
    return U_np, q_np, K_np
