"""Penalized-regression solver: optimality, equivariance, and error paths.

Oracles
-------
``ols_oracle``        closed-form weighted least squares via normal equations
``objective_oracle``  direct evaluation of the penalized loss, written against
                      the documented objective rather than the solver's
                      internals (standardization handled explicitly here)
Both are used to certify solver output before any behavioural tests run.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from combsearch import (
    ConvergenceError,
    PenalizedSpec,
    ValidationError,
    fit_path,
    fit_penalized,
    make_lambda_grid,
)
from combsearch.shrinkage import BACKEND, kkt_residual, objective


def ols_oracle(X, y, w=None, intercept=True):
    """(b0, beta) by normal equations; the lam=0 reference solution."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n = X.shape[0]
    w = np.ones(n) if w is None else np.asarray(w, float)
    D = np.column_stack([np.ones(n), X]) if intercept else X
    A = D * w[:, None]
    coef, *_ = np.linalg.lstsq(A.T @ D, A.T @ y, rcond=None)
    if intercept:
        return float(coef[0]), coef[1:]
    return 0.0, coef


def objective_oracle(X, y, lam, alpha, beta, b0, pf=None, standardize=True):
    """Penalized loss evaluated from scratch (penalty on standardized scale)."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n, K = X.shape
    pf = np.ones(K) if pf is None else np.asarray(pf, float)
    if standardize:
        xc = X - X.mean(axis=0)
        s = np.sqrt((xc * xc).sum(axis=0) / n)
        s[s == 0.0] = 1.0
    else:
        s = np.ones(K)
    r = y - b0 - X @ beta
    bw = beta * s
    pen = lam * np.sum(pf * (alpha * np.abs(bw) + (1 - alpha) * bw * bw / 2.0))
    return float((r * r).sum() / (2.0 * n) + pen)


def random_problem(rng, n, K):
    X = rng.normal(size=(n, K))
    beta = rng.normal(size=K) * (rng.random(K) < 0.6)
    y = X @ beta + 0.5 * rng.normal(size=n)
    return X, y


# --- oracle-certified optimality -------------------------------------------

@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_lambda_zero_matches_ols(alpha):
    rng = np.random.default_rng(11)
    for _ in range(5):
        X, y = random_problem(rng, 30, 6)
        fit = fit_penalized(X, y, PenalizedSpec(alpha=alpha, lam=0.0))
        b0, beta = ols_oracle(X, y)
        assert abs(fit.intercept - b0) < 1e-8
        np.testing.assert_allclose(fit.beta, beta, atol=1e-8)


def test_lambda_zero_weighted_matches_weighted_ols():
    rng = np.random.default_rng(12)
    X, y = random_problem(rng, 25, 4)
    w = rng.random(25) + 0.1
    fit = fit_penalized(X, y, PenalizedSpec(alpha=1.0, lam=0.0),
                        sample_weights=w)
    b0, beta = ols_oracle(X, y, w)
    assert abs(fit.intercept - b0) < 1e-8
    np.testing.assert_allclose(fit.beta, beta, atol=1e-8)


def test_huge_lambda_gives_intercept_only():
    rng = np.random.default_rng(13)
    X, y = random_problem(rng, 20, 5)
    fit = fit_penalized(X, y, PenalizedSpec(alpha=1.0, lam=1e8))
    np.testing.assert_array_equal(fit.beta, np.zeros(5))
    assert fit.intercept == pytest.approx(y.mean(), abs=1e-12)


def test_objective_descent_under_perturbation():
    # the fitted point must beat random perturbations of itself under the
    # independently evaluated objective (intercept re-profiled on both sides)
    rng = np.random.default_rng(14)
    for alpha in (0.0, 0.65, 1.0):
        X, y = random_problem(rng, 24, 5)
        lam = 0.05
        fit = fit_penalized(X, y, PenalizedSpec(alpha=alpha, lam=lam))
        base = objective_oracle(X, y, lam, alpha, fit.beta,
                                y.mean() - X.mean(axis=0) @ fit.beta)
        for scale in (1e-3, 1e-1):
            for _ in range(40):
                b = fit.beta + scale * rng.normal(size=5)
                b0 = y.mean() - X.mean(axis=0) @ b
                assert objective_oracle(X, y, lam, alpha, b, b0) >= base - 1e-12


def test_objective_helper_matches_oracle():
    rng = np.random.default_rng(15)
    X, y = random_problem(rng, 18, 4)
    pf = np.array([1.0, 0.5, 2.0, 0.0])
    spec = PenalizedSpec(alpha=0.3, lam=0.2, penalty_factors=pf)
    beta = rng.normal(size=4)
    b0 = y.mean() - X.mean(axis=0) @ beta
    assert objective(X, y, spec, beta) == pytest.approx(
        objective_oracle(X, y, 0.2, 0.3, beta, b0, pf), rel=1e-12)


def test_kkt_residual_small_across_problem_sizes():
    rng = np.random.default_rng(16)
    grid = make_lambda_grid(40, 4.0, -6.0)
    for n, K in [(30, 6), (12, 8), (6, 10), (50, 3)]:
        for alpha in (0.0, 0.5, 0.65, 1.0):
            X, y = random_problem(rng, n, K)
            pf = None if alpha == 0.5 else rng.random(K) * 2 + 0.05
            path = fit_path(X, y, grid, alpha=alpha, penalty_factors=pf)
            for i in (0, len(grid) // 2, len(grid) - 1):
                spec = PenalizedSpec(alpha=alpha, lam=float(grid[i]),
                                     penalty_factors=pf)
                assert kkt_residual(X, y, spec, path.fit_at(i)) < 1e-8


def test_path_matches_pointwise_fits():
    # warm starts must not move the solution: same KKT point either way
    rng = np.random.default_rng(17)
    X, y = random_problem(rng, 25, 5)
    grid = make_lambda_grid(25, 2.0, -4.0)
    path = fit_path(X, y, grid, alpha=0.65)
    for i in range(0, 25, 6):
        spec = PenalizedSpec(alpha=0.65, lam=float(grid[i]))
        solo = fit_penalized(X, y, spec)
        np.testing.assert_allclose(path.betas[i], solo.beta, atol=1e-6)
        assert objective(X, y, spec, path.betas[i]) == pytest.approx(
            objective(X, y, spec, solo.beta), abs=1e-12)


def test_determinism_bitwise():
    rng = np.random.default_rng(18)
    X, y = random_problem(rng, 30, 7)
    grid = make_lambda_grid(50, 3.0, -5.0)
    a = fit_path(X, y, grid, alpha=1.0)
    b = fit_path(X, y, grid, alpha=1.0)
    np.testing.assert_array_equal(a.betas, b.betas)
    np.testing.assert_array_equal(a.intercepts, b.intercepts)
    np.testing.assert_array_equal(a.sweeps, b.sweeps)


def test_standardize_makes_fits_scale_equivariant():
    # scaling a column by 4 scales its coefficient by 1/4 and leaves fitted
    # values unchanged (power-of-two factor: exact in floating point)
    rng = np.random.default_rng(19)
    X, y = random_problem(rng, 22, 4)
    X2 = X.copy()
    X2[:, 1] *= 4.0
    for lam in (0.3, 0.01):
        f1 = fit_penalized(X, y, PenalizedSpec(alpha=1.0, lam=lam))
        f2 = fit_penalized(X2, y, PenalizedSpec(alpha=1.0, lam=lam))
        np.testing.assert_allclose(f2.beta[1] * 4.0, f1.beta[1], rtol=1e-12)
        np.testing.assert_allclose(f2.predict(X2), f1.predict(X), rtol=1e-12)


def test_penalty_factor_zero_is_never_shrunk_away():
    rng = np.random.default_rng(20)
    X, y = random_problem(rng, 30, 4)
    pf = np.array([0.0, 1.0, 1.0, 1.0])
    fit = fit_penalized(X, y, PenalizedSpec(alpha=1.0, lam=1e6,
                                            penalty_factors=pf))
    # the unpenalized column stays active while the rest are crushed
    assert fit.beta[0] != 0.0
    np.testing.assert_array_equal(fit.beta[1:], np.zeros(3))


def test_extreme_penalty_factors_small_n_converge():
    # underdetermined systems with wildly uneven penalty factors at tiny
    # lambda exercise the active-set polish fallback
    rng = np.random.default_rng(21)
    grid = make_lambda_grid(30, 2.0, -15.0)
    for _ in range(20):
        X, y = random_problem(rng, 5, 8)
        pf = 10.0 ** rng.uniform(-3, 3, 8)
        path = fit_path(X, y, grid, alpha=1.0, penalty_factors=pf)
        spec = PenalizedSpec(alpha=1.0, lam=float(grid[-1]), penalty_factors=pf)
        assert kkt_residual(X, y, spec, path.fit_at(len(grid) - 1)) < 1e-8


def test_no_intercept_and_no_standardize_modes():
    rng = np.random.default_rng(22)
    X, y = random_problem(rng, 20, 3)
    fit = fit_penalized(X, y, PenalizedSpec(alpha=0.0, lam=0.0,
                                            intercept=False))
    b0, beta = ols_oracle(X, y, intercept=False)
    assert fit.intercept == 0.0
    np.testing.assert_allclose(fit.beta, beta, atol=1e-8)

    # standardize=False ridge has the closed form (X'X/n + lam I)b = X'y/n
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    lam = 0.7
    fit2 = fit_penalized(X, y, PenalizedSpec(alpha=0.0, lam=lam,
                                             standardize=False))
    ref = np.linalg.solve(Xc.T @ Xc / 20 + lam * np.eye(3), Xc.T @ yc / 20)
    np.testing.assert_allclose(fit2.beta, ref, atol=1e-9)


def test_validation_errors():
    X = np.ones((5, 2))
    y = np.ones(5)
    with pytest.raises(ValidationError):
        PenalizedSpec(alpha=1.5, lam=0.1)
    with pytest.raises(ValidationError):
        PenalizedSpec(alpha=0.5, lam=-1.0)
    with pytest.raises(ValidationError):
        PenalizedSpec(alpha=0.5, lam=0.1, penalty_factors=[-1.0, 1.0])
    with pytest.raises(ValidationError):
        fit_penalized(X, np.ones(4), PenalizedSpec(alpha=1.0, lam=0.1))
    with pytest.raises(ValidationError):
        fit_penalized(np.array([[np.nan, 1.0]] * 5), y,
                      PenalizedSpec(alpha=1.0, lam=0.1))
    with pytest.raises(ValidationError):
        fit_penalized(X, y, PenalizedSpec(alpha=1.0, lam=0.1),
                      sample_weights=np.zeros(5))
    with pytest.raises(ValidationError):
        fit_path(X, y, [0.1, 0.2], alpha=1.0)       # ascending grid
    with pytest.raises(ValidationError):
        fit_path(X, y, [], alpha=1.0)
    with pytest.raises(ValidationError):
        fit_penalized(X, y, PenalizedSpec(alpha=1.0, lam=0.1,
                                          penalty_factors=[1.0, 1.0, 1.0]))
    with pytest.raises(ValidationError):
        make_lambda_grid(1)
    with pytest.raises(ValidationError):
        make_lambda_grid(10, -2.0, 2.0)


def test_lambda_grid_shape_frozen():
    g = make_lambda_grid()
    assert len(g) == 200
    assert g[0] == pytest.approx(np.exp(15.0), rel=1e-15)
    assert g[-1] == pytest.approx(np.exp(-15.0), rel=1e-15)
    assert np.all(np.diff(g) < 0)


def test_backend_parity_with_pure_python():
    # compiled kernel and pure-python twin agree to machine precision (dot
    # products reduce in different orders, so bitwise equality is not the
    # contract); the fallback runs in a subprocess because the backend is
    # chosen at import time
    rng = np.random.default_rng(23)
    X, y = random_problem(rng, 20, 5)
    grid = make_lambda_grid(30, 3.0, -6.0)
    here = fit_path(X, y, grid, alpha=0.65)
    prog = (
        "import json, sys\n"
        "import numpy as np\n"
        "from combsearch.shrinkage import BACKEND, fit_path\n"
        "X = np.array(json.loads(sys.argv[1])); y = np.array(json.loads(sys.argv[2]))\n"
        "g = np.array(json.loads(sys.argv[3]))\n"
        "p = fit_path(X, y, g, alpha=0.65)\n"
        "print(json.dumps({'backend': BACKEND, 'betas': p.betas.tolist(),\n"
        "                  'b0': p.intercepts.tolist()}))\n"
    )
    env = dict(os.environ, COMBSEARCH_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", prog, json.dumps(X.tolist()),
         json.dumps(y.tolist()), json.dumps(grid.tolist())],
        capture_output=True, text=True, env=env, check=True)
    got = json.loads(out.stdout)
    assert got["backend"] == "python"
    np.testing.assert_allclose(np.array(got["betas"]), here.betas, atol=1e-12)
    np.testing.assert_allclose(np.array(got["b0"]), here.intercepts, atol=1e-12)
    assert BACKEND in ("c", "python")
