"""Stability-filtered selection with recency-sharpened quantile aggregation.

An elastic-net path is cross-validated on the training window; forecasters
are kept when they stay active across the path fits in a log-lambda
neighborhood of the chosen penalty (selection frequency above a floor).
Survivors are weighted by squared selection frequency times a very steep
inverse power of their recent RMSE, so the weight profile is close to
winner-take-most. If one forecaster dominates outright it is used alone;
otherwise the survivors' predictions are combined by a weighted quantile
slightly below the median.

Variants: ``run1a`` keeps the same selection machinery but takes the plain
median of the survivors; ``run1b`` selects with a pure LASSO and averages
the survivors equally.

Small samples degrade gracefully: fewer than 5 training rows switches the
cross-validation to leave-one-out (noted in the label), fewer than 3 falls
back to the simple average of all forecasters.
"""

from __future__ import annotations

import numpy as np

from ..shrinkage import KFold, LOO, fit_path, penalized_cv_curve, pick_lambda
from .base import Forecast, fallback_simple_average, inverse_power_weights, \
    weighted_quantile

ALPHA = 0.65
CV_FOLDS = 5
SE_MULT = 1.5
SE_MULT_VARIANT = 1.0
NEIGHBORHOOD = 0.25      # half-width in log-lambda around the chosen penalty
STABILITY_MIN = 0.4      # keep forecasters selected in > 40% of nearby fits
RECENT_ROWS = 2
RMSE_POWER = 14
DOMINANCE = 5.0          # top weight > 5x runner-up -> use top alone
QUANTILE = 0.44


def _select_stable(info, alpha, se_mult, neighborhood, stability_min):
    """CV the path, then keep coordinates active across nearby path fits.

    Returns (active indices, label suffix) or (None, suffix) on fallback.
    """
    n = info.n_train
    suffix = ""
    if n < 3:
        return None, suffix
    if n < CV_FOLDS:
        scheme = LOO()
        suffix = "[cv=loo]"
    else:
        scheme = KFold(CV_FOLDS)

    grid = info.lambda_grid
    curve = penalized_cv_curve(info.X_train, info.y_train, grid, scheme,
                               alpha=alpha)
    lam_hat = pick_lambda(curve, "within_se", se_mult)

    path = fit_path(info.X_train, info.y_train, grid, alpha=alpha)
    near = np.abs(np.log(grid) - np.log(lam_hat)) < neighborhood
    pi = (path.betas[near] != 0.0).mean(axis=0)
    active = np.flatnonzero(pi > stability_min)
    if active.size == 0:
        return None, suffix
    return (active, pi[active]), suffix


def _recent_rmse(info, cols, rows):
    m = min(rows, info.n_train)
    err = info.y_train[-m:, None] - info.X_train[-m:, cols]
    return np.sqrt((err ** 2).mean(axis=0))


def _run1_core(info, *, alpha, se_mult, aggregate, label,
               neighborhood=NEIGHBORHOOD, stability_min=STABILITY_MIN,
               recent_rows=RECENT_ROWS, rmse_power=RMSE_POWER,
               dominance=DOMINANCE, quantile=QUANTILE):
    picked, suffix = _select_stable(info, alpha, se_mult,
                                    neighborhood, stability_min)
    label = label + suffix
    if picked is None:
        return fallback_simple_average(info, label)
    active, pi = picked
    preds = info.x_new[active]

    if aggregate == "median":
        return Forecast(float(np.median(preds)), label)
    if aggregate == "mean":
        return Forecast(float(np.mean(preds)), label)

    rmse = _recent_rmse(info, active, recent_rows)
    w = pi ** 2 * inverse_power_weights(rmse, rmse_power)
    total = w.sum()
    if total <= 0:  # degenerate: selection frequency info only
        w = pi ** 2 / (pi ** 2).sum()
    else:
        w = w / total

    order = np.argsort(w)[::-1]
    runner_up = w[order[1]] if w.size > 1 else 0.0
    if w[order[0]] > dominance * runner_up:
        return Forecast(float(preds[order[0]]), label + "[single]")
    return Forecast(float(weighted_quantile(preds, w, quantile)), label)


def run1(info, **params):
    params.setdefault("alpha", ALPHA)
    params.setdefault("se_mult", SE_MULT)
    return _run1_core(info, aggregate="wq", label="run1", **params)


def run1a(info, **params):
    params.setdefault("alpha", ALPHA)
    params.setdefault("se_mult", SE_MULT_VARIANT)
    return _run1_core(info, aggregate="median", label="run1a", **params)


def run1b(info, **params):
    params.setdefault("alpha", 1.0)
    params.setdefault("se_mult", SE_MULT_VARIANT)
    return _run1_core(info, aggregate="mean", label="run1b", **params)
