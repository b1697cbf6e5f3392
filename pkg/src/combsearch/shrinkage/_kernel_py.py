"""Pure-Python coordinate-descent kernel (numpy fallback).

Mirrors the compiled kernel exactly: same update order, same branching, same
convergence rule, so either backend satisfies the solver contract. Works in
Gram space: for the problem

    min_b  (1/2) b'Gb - c'b + lam * sum_k pf_k * (alpha*|b_k| + (1-alpha)*b_k^2/2)

the cyclic update for coordinate k is a soft-threshold of the partial
residual correlation. Lambdas must be descending; solutions warm-start from
the previous grid point.
"""

from __future__ import annotations

import numpy as np


def cd_path(G, c, lambdas, alpha, pf, tol, max_sweeps, beta0=None):
    """Solve the penalized problem along a descending lambda path.

    Returns ``(betas, sweeps)`` where ``betas`` has shape (L, K) and
    ``sweeps[i]`` is the sweep count for lambda i, or -1 if the sweep budget
    ran out before ``max|delta b| < tol``.
    """
    G = np.ascontiguousarray(G, dtype=float)
    c = np.ascontiguousarray(c, dtype=float)
    lambdas = np.ascontiguousarray(lambdas, dtype=float)
    pf = np.ascontiguousarray(pf, dtype=float)
    K = c.shape[0]
    L = lambdas.shape[0]
    betas = np.zeros((L, K))
    sweeps = np.zeros(L, dtype=np.int64)
    beta = np.zeros(K) if beta0 is None else np.array(beta0, dtype=float)
    diag = np.diagonal(G).astype(np.float64)  # fresh copy: np.diagonal views are read-only

    for li in range(L):
        lam = lambdas[li]
        l1 = lam * alpha * pf
        l2 = lam * (1.0 - alpha) * pf
        converged = -1
        for sweep in range(max_sweeps):
            dmax = 0.0
            for k in range(K):
                bk = beta[k]
                g = c[k] - float(G[k] @ beta) + diag[k] * bk
                denom = diag[k] + l2[k]
                if denom <= 0.0:
                    bnew = 0.0
                elif g > l1[k]:
                    bnew = (g - l1[k]) / denom
                elif g < -l1[k]:
                    bnew = (g + l1[k]) / denom
                else:
                    bnew = 0.0
                if bnew != bk:
                    beta[k] = bnew
                    d = abs(bnew - bk)
                    if d > dmax:
                        dmax = d
            if dmax < tol:
                converged = sweep + 1
                break
        sweeps[li] = converged
        betas[li] = beta
    return betas, sweeps
