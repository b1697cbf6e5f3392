"""Rolling-origin evaluation of combination methods on a panel.

Origins are 1-based rows. At origin ``t`` a method sees history strictly
before ``t`` plus the current predictions (never the realization), and its
forecast is scored against row ``t``. Calls start a few rows in so training
windows are non-trivial, and scoring starts one row later still, so every
scored origin has a fully warmed-up history. Subsamples are named
*inclusion* date sets: a record is counted when its date is in the set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EvaluationError, ValidationError
from .panel import build_info
from .shrinkage import make_lambda_grid

#: pandemic quarters excluded by the ex-covid subsample
COVID_QUARTERS = ("2020Q1", "2020Q2", "2020Q3", "2020Q4")


@dataclass(frozen=True)
class EvalConfig:
    window: int = 20
    first_call_t: int = 5
    score_from_t: int = 6
    last_call_t: int | None = None
    lambda_grid: np.ndarray | None = None
    lambda_grid2: np.ndarray | None = None

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError(f"window must be >= 1, got {self.window}")
        if self.first_call_t < 2:
            raise ValidationError(
                f"first_call_t must be >= 2, got {self.first_call_t}")
        if self.score_from_t < self.first_call_t:
            raise ValidationError("score_from_t must be >= first_call_t")
        if self.last_call_t is not None and self.last_call_t < self.first_call_t:
            raise ValidationError("last_call_t must be >= first_call_t")

    def grids(self):
        grid = self.lambda_grid if self.lambda_grid is not None \
            else make_lambda_grid()
        return grid, self.lambda_grid2


class OriginRecord(NamedTuple):
    """One rolling-origin call: the forecast and its realized error."""

    t: int
    date: str
    value: float
    label: str
    actual: float
    error: float
    scored: bool


class SampleScore(NamedTuple):
    n_scored: int
    rmse: float


def rolling_evaluate(panel, method, config=None):
    """Run ``method`` at every origin; returns one OriginRecord per call.

    Any exception inside the method is re-raised as EvaluationError tagged
    with the origin, so a harness can attribute the crash.
    """
    cfg = config or EvalConfig()
    last = cfg.last_call_t if cfg.last_call_t is not None else panel.T
    if last > panel.T:
        raise ValidationError(
            f"last_call_t={last} beyond panel length {panel.T}")
    grid, grid2 = cfg.grids()
    records = []
    for t in range(cfg.first_call_t, last + 1):
        info = build_info(panel, t, cfg.window, grid, grid2)
        try:
            fc = method(info)
        except Exception as exc:
            name = getattr(method, "name", getattr(method, "__name__", "?"))
            raise EvaluationError(
                f"method {name} failed at origin {t}: {exc}",
                origin=t) from exc
        value = float(fc.value)
        if not np.isfinite(value):
            name = getattr(method, "name", getattr(method, "__name__", "?"))
            raise EvaluationError(
                f"method {name} returned non-finite forecast at origin {t}",
                origin=t)
        actual = float(panel.y[t - 1])
        records.append(OriginRecord(
            t=t, date=panel.dates[t - 1], value=value, label=fc.label,
            actual=actual, error=actual - value,
            scored=t >= cfg.score_from_t))
    return records


def rmse_of(records):
    errs = np.array([r.error for r in records], dtype=float)
    if errs.size == 0:
        return float("nan")
    return float(np.sqrt((errs ** 2).mean()))


def _select(records, dates):
    scored = [r for r in records if r.scored]
    if dates is None:
        return scored
    dates = set(dates)
    return [r for r in scored if r.date in dates]


def score_subsets(records, masks=None):
    """RMSE per named subsample. ``None`` mask means every scored origin."""
    masks = masks if masks is not None else {"all": None}
    out = {}
    for name, dates in masks.items():
        sel = _select(records, dates)
        out[name] = SampleScore(len(sel), rmse_of(sel))
    return out


def default_masks(records):
    """Full scored sample plus its complement of the pandemic quarters."""
    scored_dates = [r.date for r in records if r.scored]
    masks = {"all": None,
             "ex_covid": {d for d in scored_dates if d not in COVID_QUARTERS}}
    return masks


def aligned_errors(records_a, records_b, dates=None):
    """Paired error arrays over the common scored origins (for DM tests)."""
    sel_a = {r.t: r for r in _select(records_a, dates)}
    sel_b = {r.t: r for r in _select(records_b, dates)}
    common = sorted(set(sel_a) & set(sel_b))
    ea = np.array([sel_a[t].error for t in common], dtype=float)
    eb = np.array([sel_b[t].error for t in common], dtype=float)
    return ea, eb
