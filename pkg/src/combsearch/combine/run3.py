"""Adaptively penalized selection, forward-validated and blended.

A pilot elastic net on the training window sets per-forecaster penalty
factors (inverse absolute pilot coefficient, floored) for an adaptive LASSO
on the full history. Candidate models are (penalty level, aggregation rule)
pairs; each is scored by expanding-window forward validation with decaying
fold weights and horizon-weighted squared errors. Candidates near the best
score are model-averaged with inverse-root-score weights. The result is
blended with an equal-weight-anchored elastic net fit on the mean-adjusted
target, which shrinks combination weights toward 1/K instead of 0.

Variants: ``run3a`` validates one step ahead only and keeps the single best
simple-rule candidate with no final blend; ``run3b`` uses slower fold decay,
a tighter pilot floor, the simple rule only, and no final blend.
"""

from __future__ import annotations

import numpy as np

from ..errors import SchemeError
from ..shrinkage import LOO, PenalizedSpec, fit_path, fit_penalized, \
    penalized_cv_curve, pick_lambda
from .base import Forecast, fallback_simple_average, inverse_power_weights

PILOT_ALPHA = 0.1
PILOT_FLOOR = 5e-3            # epsilon added to |pilot beta| before inverting
HORIZON_WEIGHTS = (0.05, 0.95)
FOLD_DECAY = 0.75
MIN_TRAIN = 5
POOL_PCT = 0.01               # candidates within 1% of the best CV score
RULE_BLEND = (0.7, 0.3)       # simple-mean vs pilot-ridge-weighted mean
EEN_ALPHA = 0.5
FINAL_BLEND = (0.70, 0.30)    # penalized-selection part vs egalitarian part

FOLD_DECAY_B = 0.80
PILOT_FLOOR_B = 1e-3


def _pilot_beta(info, alpha):
    curve = penalized_cv_curve(info.X_train, info.y_train,
                               info.lambda_grid, LOO(), alpha=alpha)
    lam = pick_lambda(curve, "min")
    fit = fit_penalized(info.X_train, info.y_train,
                        PenalizedSpec(alpha=alpha, lam=lam))
    return fit.beta


def _rule_predictions(active, xrow, ridge_w, rule_blend):
    """Vectorized forecasts for every path fit under both rules.

    active: (L, K) boolean masks; xrow: (K,) current predictions.
    Empty active sets widen to all forecasters.
    """
    L, K = active.shape
    counts = active.sum(axis=1)
    full_simple = float(xrow.mean())
    rw_total_full = ridge_w.sum()
    full_ridge = float(ridge_w @ xrow / rw_total_full) if rw_total_full > 0 \
        else full_simple

    with np.errstate(invalid="ignore", divide="ignore"):
        simple = (active @ xrow) / counts
    simple = np.where(counts == 0, full_simple, simple)

    rw_sum = active @ ridge_w
    with np.errstate(invalid="ignore", divide="ignore"):
        ridge = (active @ (ridge_w * xrow)) / rw_sum
    ridge = np.where(counts == 0, full_ridge,
                     np.where(rw_sum > 0, ridge, simple))
    blend = rule_blend[0] * simple + rule_blend[1] * ridge
    return {"simple": simple, "blend": blend}


def _forward_scores(Xh, yh, grid, pf, rules, ridge_w, rule_blend,
                    horizon_weights, fold_decay, min_train):
    """Forward-validation score per (lambda, rule) candidate."""
    hw = np.asarray(horizon_weights, dtype=float)
    nz = np.flatnonzero(hw != 0)
    if nz.size == 0:
        raise SchemeError("horizon weights are all zero")
    max_step = int(nz[-1]) + 1
    n = len(yh)
    starts = list(range(min_train, n - max_step + 1))
    if not starts:
        raise SchemeError(
            f"need at least {min_train + max_step} history rows, have {n}")
    F = len(starts)
    fold_w = fold_decay ** np.arange(F - 1, -1, -1, dtype=float)
    fold_w = fold_w / fold_w.sum()

    L = len(grid)
    scores = {rule: np.zeros(L) for rule in rules}
    for f, t0 in enumerate(starts):
        path = fit_path(Xh[:t0], yh[:t0], grid, alpha=1.0, penalty_factors=pf)
        active = path.betas != 0.0
        for s in nz:
            preds = _rule_predictions(active, Xh[t0 + s], ridge_w, rule_blend)
            for rule in rules:
                e2 = (yh[t0 + s] - preds[rule]) ** 2
                scores[rule] += fold_w[f] * hw[s] * e2
    return scores


def _egalitarian_forecast(info, alpha):
    """Elastic net on the mean-adjusted target; weights anchored at 1/K."""
    ytil = info.y_train - info.X_train.mean(axis=1)
    curve = penalized_cv_curve(info.X_train, ytil, info.lambda_grid,
                               LOO(), alpha=alpha)
    lam = pick_lambda(curve, "min")
    fit = fit_penalized(info.X_train, ytil, PenalizedSpec(alpha=alpha, lam=lam))
    return float(fit.intercept + fit.beta @ info.x_new + info.x_new.mean())


def _run3_core(info, *, label, pilot_alpha=PILOT_ALPHA, epsilon=PILOT_FLOOR,
               horizon_weights=HORIZON_WEIGHTS, fold_decay=FOLD_DECAY,
               min_train=MIN_TRAIN, rules=("simple", "blend"),
               averaging="pool", pool_pct=POOL_PCT, rule_blend=RULE_BLEND,
               een_alpha=EEN_ALPHA, final_blend=FINAL_BLEND):
    grid = info.lambda_grid
    try:
        pilot = _pilot_beta(info, pilot_alpha)
    except SchemeError:
        return fallback_simple_average(info, label)
    pf = 1.0 / (np.abs(pilot) + epsilon)
    pf = pf / pf.mean()
    ridge_w = np.clip(pilot, 0.0, None)

    Xh, yh = info.X_history, info.y_history
    try:
        scores = _forward_scores(Xh, yh, grid, pf, rules, ridge_w, rule_blend,
                                 horizon_weights, fold_decay, min_train)
    except SchemeError:
        return fallback_simple_average(info, label)

    # candidate order: lambda descending within rule, rules as given
    flat = [(scores[rule][j], j, rule)
            for rule in rules for j in range(len(grid))]
    best = min(s for s, _, _ in flat)

    path = fit_path(Xh, yh, grid, alpha=1.0, penalty_factors=pf)
    active = path.betas != 0.0
    preds = _rule_predictions(active, info.x_new, ridge_w, rule_blend)

    if averaging == "min":
        for s, j, rule in flat:
            if s == best:
                pe = float(preds[rule][j])
                break
    else:
        pooled = [(s, j, rule) for s, j, rule in flat
                  if s <= best * (1.0 + pool_pct)]
        pool_scores = np.array([s for s, _, _ in pooled])
        w = inverse_power_weights(pool_scores, 0.5)
        pe = float(sum(wi * preds[rule][j]
                       for wi, (_, j, rule) in zip(w, pooled)))

    if final_blend[1] == 0.0:
        return Forecast(final_blend[0] * pe, label)
    try:
        een = _egalitarian_forecast(info, een_alpha)
    except SchemeError:
        return fallback_simple_average(info, label)
    return Forecast(final_blend[0] * pe + final_blend[1] * een, label)


def run3(info, **params):
    return _run3_core(info, label="run3", **params)


def run3a(info, **params):
    params.setdefault("horizon_weights", (1.0,))
    params.setdefault("averaging", "min")
    params.setdefault("rules", ("simple",))
    params.setdefault("final_blend", (1.0, 0.0))
    return _run3_core(info, label="run3a", **params)


def run3b(info, **params):
    params.setdefault("fold_decay", FOLD_DECAY_B)
    params.setdefault("epsilon", PILOT_FLOOR_B)
    params.setdefault("rules", ("simple",))
    params.setdefault("final_blend", (1.0, 0.0))
    return _run3_core(info, label="run3b", **params)
