# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled coordinate-descent kernel; twin of _kernel_py.cd_path."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def cd_path(G, c, lambdas, double alpha, pf, double tol, long max_sweeps,
            beta0=None):
    """Gram-space elastic-net path solve over a descending lambda grid.

    Same contract as the pure-Python kernel: returns (betas (L, K),
    sweeps (L,)) with sweeps[i] = -1 when lambda i failed to converge.
    """
    cdef double[:, ::1] Gv = np.ascontiguousarray(G, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] lamv = np.ascontiguousarray(lambdas, dtype=np.float64)
    cdef double[::1] pfv = np.ascontiguousarray(pf, dtype=np.float64)
    cdef Py_ssize_t K = cv.shape[0]
    cdef Py_ssize_t L = lamv.shape[0]

    betas = np.zeros((L, K), dtype=np.float64)
    sweeps = np.zeros(L, dtype=np.int64)
    cdef double[:, ::1] B = betas
    cdef cnp.int64_t[::1] S = sweeps

    beta_arr = np.zeros(K, dtype=np.float64) if beta0 is None else \
        np.array(beta0, dtype=np.float64)
    cdef double[::1] beta = beta_arr
    cdef double[::1] diag = np.diagonal(G).astype(np.float64)  # astype: always a fresh writable copy

    cdef Py_ssize_t li, k, j
    cdef long sweep, converged
    cdef double lam, l1k, l2k, g, bk, bnew, d, dmax, denom

    for li in range(L):
        lam = lamv[li]
        converged = -1
        for sweep in range(max_sweeps):
            dmax = 0.0
            for k in range(K):
                bk = beta[k]
                g = cv[k]
                for j in range(K):
                    g -= Gv[k, j] * beta[j]
                g += diag[k] * bk
                l1k = lam * alpha * pfv[k]
                l2k = lam * (1.0 - alpha) * pfv[k]
                denom = diag[k] + l2k
                if denom <= 0.0:
                    bnew = 0.0
                elif g > l1k:
                    bnew = (g - l1k) / denom
                elif g < -l1k:
                    bnew = (g + l1k) / denom
                else:
                    bnew = 0.0
                if bnew != bk:
                    beta[k] = bnew
                    d = fabs(bnew - bk)
                    if d > dmax:
                        dmax = d
            if dmax < tol:
                converged = sweep + 1
                break
        S[li] = converged
        for k in range(K):
            B[li, k] = beta[k]
    return betas, sweeps
