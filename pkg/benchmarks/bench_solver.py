"""Compare the compiled and pure-Python descent kernels: speed + agreement.

Run:  python3 benchmarks/bench_solver.py [--n 40] [--k 23] [--reps 5]
"""

from __future__ import annotations

import argparse
import importlib
import os
import subprocess
import sys
import time

import numpy as np


def bench_backend(backend, n, k, reps):
    """Time full-grid path fits in a subprocess pinned to one backend."""
    code = f"""
import time
import numpy as np
from combsearch.shrinkage import BACKEND, fit_path, make_lambda_grid

rng = np.random.default_rng(0)
X = rng.normal(size=({n}, {k}))
beta = np.zeros({k}); beta[:4] = [1.5, -2.0, 0.0, 0.7]
y = X @ beta + rng.normal(size={n}) * 0.5
grid = make_lambda_grid()

fit_path(X, y, grid, alpha=0.65)  # warm-up
t0 = time.perf_counter()
for _ in range({reps}):
    path = fit_path(X, y, grid, alpha=0.65)
dt = (time.perf_counter() - t0) / {reps}
print(BACKEND)
print(dt)
print(repr(path.betas.sum()))
"""
    env = dict(os.environ)
    env["COMBSEARCH_BACKEND"] = backend
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    name, dt, checksum = out.stdout.strip().splitlines()
    return name, float(dt), checksum


def agreement(n, k):
    """Max |beta difference| between backends over a grid of problems."""
    rng = np.random.default_rng(1)
    X = rng.normal(size=(n, k))
    y = X[:, 0] - 0.5 * X[:, 1] + rng.normal(size=n)
    worst = 0.0
    for backend in ("c", "python"):
        os.environ["COMBSEARCH_BACKEND"] = backend
        for mod in ("combsearch.shrinkage.backend", "combsearch.shrinkage.solver",
                    "combsearch.shrinkage.cv", "combsearch.shrinkage"):
            if mod in sys.modules:
                importlib.reload(sys.modules[mod])
        from combsearch.shrinkage import fit_path, make_lambda_grid
        betas = fit_path(X, y, make_lambda_grid(), alpha=0.65).betas
        if backend == "c":
            ref = betas
        else:
            worst = float(np.abs(betas - ref).max())
    os.environ.pop("COMBSEARCH_BACKEND", None)
    return worst


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=40)
    ap.add_argument("--k", type=int, default=23)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    rows = []
    for backend in ("c", "python"):
        try:
            rows.append(bench_backend(backend, args.n, args.k, args.reps))
        except subprocess.CalledProcessError as exc:
            print(f"backend {backend!r} unavailable: {exc.stderr.strip()}")
    for name, dt, checksum in rows:
        print(f"backend={name:<7s} 200-point path fit: {dt * 1e3:8.2f} ms   "
              f"checksum {checksum}")
    if len(rows) == 2:
        speedup = rows[1][1] / rows[0][1]
        same = rows[0][2] == rows[1][2]
        print(f"speedup: {speedup:.1f}x   identical coefficient checksums: {same}")
        print(f"max |beta_c - beta_py| on a fresh problem: {agreement(args.n, args.k):.3e}")


if __name__ == "__main__":
    main()
