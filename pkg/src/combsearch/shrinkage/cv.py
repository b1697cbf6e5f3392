"""Cross-validation curves over a lambda grid, and lambda selection rules.

Schemes are deterministic by construction: leave-one-out, contiguous k-fold
blocks, or an expanding forward scheme that scores one or more steps ahead
with recency-weighted folds. The curve is generic in the prediction rule: a
``predictor(fit, row) -> float`` callback turns a fitted coefficient vector
into a forecast, so the same machinery serves plain regression predictions
and selection-based combination rules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemeError, ValidationError
from .solver import PenalizedSpec, fit_path, fit_penalized


@dataclass(frozen=True)
class LOO:
    """Leave-one-out; per-observation losses act as folds for the SE."""

    def tag(self):
        return "loo"


@dataclass(frozen=True)
class KFold:
    """m contiguous deterministic blocks in row order."""

    m: int

    def tag(self):
        return f"kfold({self.m})"


@dataclass(frozen=True)
class Forward:
    """Expanding-origin scheme scoring the rows after each training cut.

    Fold f trains on the first t_f rows (t_f = min_train, min_train+1, ...)
    and scores rows t_f+1..t_f+S where S is the largest horizon with a
    nonzero weight; the fold criterion is sum_s horizon_weights[s-1]*e_s^2,
    and folds are averaged with weights proportional to fold_decay**(F-f)
    (normalized), so later folds dominate. No standard errors.
    """

    horizon_weights: tuple
    fold_decay: float
    min_train: int

    def __post_init__(self):
        hw = tuple(float(h) for h in self.horizon_weights)
        if not hw or any(h < 0 or not np.isfinite(h) for h in hw) or not any(hw):
            raise ValidationError("horizon weights must be >= 0 with a nonzero entry")
        if not 0.0 < self.fold_decay <= 1.0:
            raise ValidationError(f"fold_decay must be in (0, 1], got {self.fold_decay}")
        if self.min_train < 1:
            raise ValidationError(f"min_train must be >= 1, got {self.min_train}")
        object.__setattr__(self, "horizon_weights", hw)

    @property
    def max_step(self):
        nz = [i for i, h in enumerate(self.horizon_weights) if h > 0]
        return nz[-1] + 1

    def tag(self):
        return (f"forward(h={self.horizon_weights}, decay={self.fold_decay}, "
                f"min_train={self.min_train})")


@dataclass(frozen=True)
class CVCurve:
    lambdas: np.ndarray
    scores: np.ndarray
    score_se: np.ndarray | None
    scheme: str
    n_folds: int


def _grid_fits(X, y, grid, spec_builder):
    """Fit every lambda on (X, y); path-solved when the specs allow it."""
    specs = [spec_builder(float(lam)) for lam in grid]
    first = specs[0]
    uniform = all(
        s.alpha == first.alpha
        and s.intercept == first.intercept
        and s.standardize == first.standardize
        and (
            (s.penalty_factors is None and first.penalty_factors is None)
            or (s.penalty_factors is not None and first.penalty_factors is not None
                and np.array_equal(s.penalty_factors, first.penalty_factors))
        )
        and s.lam == float(lam)
        for s, lam in zip(specs, grid)
    )
    if uniform and len(grid) > 1 and np.all(np.diff(grid) < 0):
        path = fit_path(X, y, grid, alpha=first.alpha,
                        penalty_factors=first.penalty_factors,
                        intercept=first.intercept,
                        standardize=first.standardize)
        return [path.fit_at(i) for i in range(len(path))]
    return [fit_penalized(X, y, s) for s in specs]


def _predict_grid(fits, row, predictor):
    return np.array([float(predictor(f, row)) for f in fits])


def _fold_indices(scheme, n):
    if isinstance(scheme, LOO):
        if n < 3:
            raise SchemeError(f"leave-one-out needs n >= 3, got {n}")
        return [(np.array([i]), np.delete(np.arange(n), i)) for i in range(n)]
    if isinstance(scheme, KFold):
        if scheme.m < 2:
            raise SchemeError(f"k-fold needs m >= 2, got {scheme.m}")
        if n < scheme.m:
            raise SchemeError(f"k-fold needs n >= m, got n={n}, m={scheme.m}")
        blocks = np.array_split(np.arange(n), scheme.m)
        return [(b, np.delete(np.arange(n), b)) for b in blocks]
    raise ValidationError(f"unsupported scheme {scheme!r}")


def _cv_curves(X, y, grid, scheme, spec_builder, predictors):
    """One CV pass, scored under several predictors at once (fits shared)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    grid = np.asarray(grid, dtype=float)
    n = X.shape[0]
    P = len(predictors)
    L = len(grid)

    if isinstance(scheme, Forward):
        S = scheme.max_step
        hw = scheme.horizon_weights
        last_start = n - S
        if last_start < scheme.min_train:
            raise SchemeError(
                f"forward scheme needs n >= min_train + {S} "
                f"(= {scheme.min_train + S}), got n={n}")
        starts = list(range(scheme.min_train, last_start + 1))
        F = len(starts)
        fold_w = scheme.fold_decay ** np.arange(F - 1, -1, -1, dtype=float)
        fold_w /= fold_w.sum()
        scores = np.zeros((P, L))
        for f, t_f in enumerate(starts):
            fits = _grid_fits(X[:t_f], y[:t_f], grid, spec_builder)
            crit = np.zeros((P, L))
            for s in range(1, S + 1):
                if hw[s - 1] == 0.0:
                    continue
                row = X[t_f + s - 1]
                actual = y[t_f + s - 1]
                for p, pred in enumerate(predictors):
                    e = actual - _predict_grid(fits, row, pred)
                    crit[p] += hw[s - 1] * e * e
            scores += fold_w[f] * crit
        return [CVCurve(lambdas=grid.copy(), scores=scores[p], score_se=None,
                        scheme=scheme.tag(), n_folds=F) for p in range(P)]

    folds = _fold_indices(scheme, n)
    errs = np.full((P, len(folds), L), np.nan)
    fold_sizes = np.array([len(te) for te, _ in folds], dtype=float)
    sq_sums = np.zeros((P, len(folds), L))
    for fi, (test_idx, train_idx) in enumerate(folds):
        fits = _grid_fits(X[train_idx], y[train_idx], grid, spec_builder)
        for p, pred in enumerate(predictors):
            acc = np.zeros(L)
            for i in test_idx:
                e = y[i] - _predict_grid(fits, X[i], pred)
                acc += e * e
            sq_sums[p, fi] = acc
            errs[p, fi] = acc / len(test_idx)
    curves = []
    for p in range(P):
        scores = sq_sums[p].sum(axis=0) / n
        fold_means = errs[p]
        se = fold_means.std(axis=0, ddof=1) / np.sqrt(len(folds))
        curves.append(CVCurve(lambdas=grid.copy(), scores=scores,
                              score_se=se, scheme=scheme.tag(),
                              n_folds=len(folds)))
    return curves


def cv_curve(X, y, grid, scheme, spec_builder, predictor):
    """Held-out squared-error curve over the grid under ``scheme``.

    ``spec_builder(lam)`` supplies the :class:`PenalizedSpec` per grid point;
    ``predictor(fit, row)`` maps a fit and a feature row to a forecast.
    """
    return _cv_curves(X, y, grid, scheme, spec_builder, [predictor])[0]


def regression_predictor(fit, row):
    """Plain linear prediction: intercept + row . beta."""
    return fit.intercept + float(np.asarray(row, dtype=float) @ fit.beta)


def penalized_cv_curve(X, y, grid, scheme, alpha, penalty_factors=None):
    """CV curve for an ordinary penalized regression at mixing weight alpha."""
    def build(lam):
        return PenalizedSpec(alpha=alpha, lam=lam,
                             penalty_factors=penalty_factors)
    return cv_curve(X, y, grid, scheme, build, regression_predictor)


def _finite_scores(curve):
    finite = np.isfinite(curve.scores)
    if not finite.any():
        raise ValidationError("CV curve has no finite scores")
    return finite


def pick_lambda_index(curve, rule, value=None):
    """Index (or index array for within_pct) into ``curve.lambdas``."""
    finite = _finite_scores(curve)
    scores = np.where(finite, curve.scores, np.inf)
    i_min = int(np.argmin(scores))  # first occurrence = largest lambda on ties
    if rule == "min":
        return i_min
    if rule == "within_se":
        if curve.score_se is None:
            raise ValidationError(
                f"scheme {curve.scheme} provides no standard errors")
        if value is None or value < 0:
            raise ValidationError("within_se needs a factor >= 0")
        threshold = scores[i_min] + float(value) * float(curve.score_se[i_min])
        ok = np.flatnonzero(finite & (curve.scores <= threshold))
        return int(ok[0])  # grid is descending: first index = largest lambda
    if rule == "within_pct":
        if value is None or value < 0:
            raise ValidationError("within_pct needs a fraction >= 0")
        threshold = (1.0 + float(value)) * scores[i_min]
        return np.flatnonzero(finite & (curve.scores <= threshold))
    raise ValidationError(f"unknown lambda rule {rule!r}")


def pick_lambda(curve, rule, value=None):
    """Lambda under a selection rule.

    ``"min"`` and ``"within_se"`` return one float (ties resolve to the
    largest lambda); ``"within_pct"`` returns the array of lambdas whose
    score is within ``value`` (fraction) of the minimum, in grid order.
    """
    idx = pick_lambda_index(curve, rule, value)
    if rule == "within_pct":
        return curve.lambdas[idx].copy()
    return float(curve.lambdas[idx])


__all__ = [
    "CVCurve", "Forward", "KFold", "LOO", "cv_curve", "pick_lambda",
    "pick_lambda_index", "regression_predictor",
]
