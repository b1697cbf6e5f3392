"""Two-step selection-then-shrink-toward-equality combiners.

Stage 1 runs a LASSO of realizations on forecaster predictions over the
training window and keeps the active set A. Stage 2 combines the survivors:
their plain average, or a ridge/LASSO re-fit on the equal-weight-transformed
target ``y - mean(x_A)`` whose coefficients shrink the combination weights
toward 1/|A| rather than toward zero. The ex-post variant grid-searches the
stage-1 penalty against realized evaluation errors and is labelled as an
oracle: it uses information unavailable in real time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..panel import build_info
from ..shrinkage import PenalizedSpec, fit_path, fit_penalized
from .base import Forecast, fallback_simple_average


def _normalize_stage2(stage2):
    if stage2 == "avg" or stage2 == ("avg", None):
        return "avg", None
    if isinstance(stage2, (tuple, list)) and len(stage2) == 2:
        kind, lam2 = stage2
        if kind in ("eridge", "elasso"):
            lam2 = float(lam2)
            if not np.isfinite(lam2) or lam2 < 0:
                raise ValidationError(f"stage-2 lambda must be >= 0, got {lam2}")
            return kind, lam2
    raise ValidationError(
        f"stage2 must be 'avg', ('eridge', lam) or ('elasso', lam); got {stage2!r}")


def _stage2_forecast(X_train, y_train, x_new, active, kind, lam2):
    """Combine the active set; returns the point forecast."""
    sub = np.asarray(active, dtype=int)
    a = sub.size
    if kind == "avg":
        return float(np.mean(x_new[sub]))
    Xa = X_train[:, sub]
    ytil = y_train - Xa.mean(axis=1)
    alpha = 0.0 if kind == "eridge" else 1.0
    fit = fit_penalized(Xa, ytil, PenalizedSpec(alpha=alpha, lam=lam2))
    # predicted transformed target plus the equal-weight anchor:
    # intercept + sum_k (beta_k + 1/|A|) x_k
    return float(fit.intercept + x_new[sub] @ fit.beta + x_new[sub].mean())


def pelasso_two_step(info, lambda1, stage2="avg"):
    """Select with a LASSO at ``lambda1``, then combine the survivors."""
    kind, lam2 = _normalize_stage2(stage2)
    label = f"pelasso_{kind}"
    if not np.isfinite(lambda1) or lambda1 < 0:
        raise ValidationError(f"lambda1 must be >= 0, got {lambda1}")
    fit = fit_penalized(info.X_train, info.y_train,
                        PenalizedSpec(alpha=1.0, lam=float(lambda1)))
    active = np.flatnonzero(fit.beta != 0.0)
    if active.size == 0:
        return fallback_simple_average(info, label)
    value = _stage2_forecast(info.X_train, info.y_train, info.x_new,
                             active, kind, lam2)
    return Forecast(value, label)


def pelasso_fixed(lambda1, stage2="avg"):
    """Frozen-penalty wrapper, e.g. for re-using an ex-post lambda elsewhere."""
    def fn(info):
        return pelasso_two_step(info, lambda1, stage2)
    return fn


@dataclass(frozen=True)
class ExPostResult:
    """Oracle evaluation output: per-origin forecasts plus chosen penalties."""

    origins: tuple
    forecasts: np.ndarray
    errors: np.ndarray
    chosen_lambda: dict
    rmse: dict
    label: str


def expost_pelasso(panel, eval_origins, stage2="avg", mode="fixed",
                   grid=None, window=20):
    """Grid-search the stage-1 penalty against realized errors (oracle).

    ``mode="fixed"`` picks the single lambda minimizing RMSE over all
    ``eval_origins``; ``mode="per_window"`` re-optimizes separately over the
    origins falling in the panel's search sample and in its holdout
    (partitioned by ``panel.split``), which coincides with fixed mode when
    only one part is populated. Ties resolve to the largest lambda.
    """
    if mode not in ("fixed", "per_window"):
        raise ValidationError(f"mode must be 'fixed' or 'per_window', got {mode!r}")
    kind, lam2 = _normalize_stage2(stage2)
    if grid is None:
        raise ValidationError("an explicit lambda grid is required")
    grid = np.asarray(grid, dtype=float)
    origins = [int(t) for t in eval_origins]
    if not origins:
        raise ValidationError("eval_origins must be non-empty")

    L = len(grid)
    fc = np.zeros((len(origins), L))
    actual = np.zeros(len(origins))
    for i, t in enumerate(origins):
        info = build_info(panel, t, window, grid)
        if len(grid) > 1:
            path = fit_path(info.X_train, info.y_train, grid, alpha=1.0)
            betas = path.betas
        else:
            f = fit_penalized(info.X_train, info.y_train,
                              PenalizedSpec(alpha=1.0, lam=float(grid[0])))
            betas = f.beta[None, :]
        for j in range(L):
            active = np.flatnonzero(betas[j] != 0.0)
            if active.size == 0:
                fc[i, j] = float(np.mean(info.x_new))
            else:
                fc[i, j] = _stage2_forecast(info.X_train, info.y_train,
                                            info.x_new, active, kind, lam2)
        actual[i] = panel.y[t - 1]

    err = actual[:, None] - fc
    origin_arr = np.asarray(origins)
    if mode == "fixed":
        parts = {"all": np.arange(len(origins))}
    else:
        in_holdout = origin_arr > panel.split
        parts = {}
        if (~in_holdout).any():
            parts["search"] = np.flatnonzero(~in_holdout)
        if in_holdout.any():
            parts["holdout"] = np.flatnonzero(in_holdout)

    forecasts = np.zeros(len(origins))
    chosen, rmses = {}, {}
    for name, rows in parts.items():
        scores = np.sqrt((err[rows] ** 2).mean(axis=0))
        j = int(np.argmin(scores))  # first min = largest lambda
        chosen[name] = float(grid[j])
        rmses[name] = float(scores[j])
        forecasts[rows] = fc[rows, j]
    label = f"expost_pelasso_{kind}[{mode}](oracle)"
    return ExPostResult(origins=tuple(origins), forecasts=forecasts,
                        errors=actual - forecasts, chosen_lambda=chosen,
                        rmse=rmses, label=label)
