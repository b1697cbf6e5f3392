"""Rank-based top-N median combiner with LOO-tuned N and window.

Forecasters are ranked by recency-weighted mean absolute error over a
training window (exponential decay, newest row heaviest). Leave-one-out
re-ranking picks how many of the top forecasters to keep: for each held-out
row the remaining rows re-rank the forecasters by plain RMSE and an inverse
cubic weighted-MAE average of the top N predicts the held-out value; the N
minimizing the LOO RMSE wins. The window length itself is tuned the same
way over short candidate lengths plus the full window. The published
forecast is the median prediction of the top N under the chosen window's
ranking, minus a fraction of the method's LOO bias at the most recent
observation.

Variants: ``run2a`` disables the temporal decay (uniform weights, same code
path); ``run2b`` keeps the full window, penalizes large N by a log term,
and publishes the weighted average instead of the median with no bias step.
"""

from __future__ import annotations

import numpy as np

from .base import Forecast, fallback_simple_average, inverse_power_weights

TEMPORAL_DECAY = 6.0
N_MIN = 3
N_CAP = 18
MAE_POWER = 3
WINDOW_SHORT = range(4, 20)   # short candidate lengths; full window always added
BIAS_GAMMA = 0.80
COMPLEXITY_PENALTY = 0.01     # run2b: added as penalty * ln(N + 1)


def temporal_weights(n, decay):
    """Exponential recency profile over n rows, normalized to sum 1."""
    if n == 1:
        return np.ones(1)
    s = np.arange(1, n + 1, dtype=float)
    w = np.exp(-decay * (n - s) / (n - 1))
    return w / w.sum()


def _loo_table(Xw, yw, om, n_list, mae_power):
    """LOO forecasts per (held-out row, candidate N).

    Returns (rmse_loo over N from the weighted-average forecasts,
    median-forecast row for the last observation — the bias probe).
    """
    n = len(yw)
    preds_avg = np.zeros((n, len(n_list)))
    preds_med = np.zeros((n, len(n_list)))
    err = yw[:, None] - Xw
    abs_err = np.abs(err)
    sq_err = err ** 2
    idx = np.arange(n)
    for i in range(n):
        rest = idx != i
        rmse = np.sqrt(sq_err[rest].mean(axis=0))
        order = np.argsort(rmse, kind="stable")
        om_rest = om[rest] / om[rest].sum()
        wmae = om_rest @ abs_err[rest]
        for j, N in enumerate(n_list):
            top = order[:N]
            wts = inverse_power_weights(wmae[top], mae_power)
            preds_avg[i, j] = wts @ Xw[i, top]
            preds_med[i, j] = float(np.median(Xw[i, top]))
    rmse_loo = np.sqrt(((yw[:, None] - preds_avg) ** 2).mean(axis=0))
    return rmse_loo, preds_med[-1]


def _run2_core(info, *, adaptive, criterion, aggregate, bias_gamma, label,
               temporal_decay, n_min=N_MIN, n_cap=N_CAP,
               mae_power=MAE_POWER, complexity_penalty=COMPLEXITY_PENALTY):
    X, y = info.X_train, info.y_train
    n, K = info.n_train, info.K
    if n < 4:
        return fallback_simple_average(info, label)

    if K < n_min:
        n_list = [K]
    else:
        n_list = list(range(n_min, min(K, n_cap) + 1))

    if adaptive:
        windows = sorted({w for w in WINDOW_SHORT if w <= n} | {n})
    else:
        windows = [n]

    per_window = {}
    for w in windows:
        Xw, yw = X[n - w:], y[n - w:]
        om = temporal_weights(w, temporal_decay)
        rmse_loo, med_last = _loo_table(Xw, yw, om, n_list, mae_power)
        crit = rmse_loo.copy()
        if criterion == "penalized":
            crit = crit + complexity_penalty * np.log(np.asarray(n_list) + 1.0)
        j = int(np.argmin(crit))  # ties -> smallest N
        per_window[w] = (float(crit[j]), n_list[j], float(med_last[j]))

    best_score = min(v[0] for v in per_window.values())
    tied = [w for w, v in per_window.items() if v[0] == best_score]
    w_star = n if n in tied else min(tied)
    _, n_star, med_last = per_window[w_star]

    Xw, yw = X[n - w_star:], y[n - w_star:]
    om = temporal_weights(w_star, temporal_decay)
    wmae = om @ np.abs(yw[:, None] - Xw)
    top = np.argsort(wmae, kind="stable")[:n_star]
    if aggregate == "median":
        base = float(np.median(info.x_new[top]))
    else:
        wts = inverse_power_weights(wmae[top], mae_power)
        base = float(wts @ info.x_new[top])

    value = base - bias_gamma * (med_last - yw[-1])
    return Forecast(float(value), label)


def run2(info, **params):
    params.setdefault("temporal_decay", TEMPORAL_DECAY)
    return _run2_core(info, adaptive=True, criterion="rmse",
                      aggregate="median", bias_gamma=BIAS_GAMMA,
                      label="run2", **params)


def run2a(info, **params):
    params.setdefault("temporal_decay", 0.0)
    return _run2_core(info, adaptive=True, criterion="rmse",
                      aggregate="median", bias_gamma=BIAS_GAMMA,
                      label="run2a", **params)


def run2b(info, **params):
    params.setdefault("temporal_decay", TEMPORAL_DECAY)
    return _run2_core(info, adaptive=False, criterion="penalized",
                      aggregate="wavg", bias_gamma=0.0,
                      label="run2b", **params)
