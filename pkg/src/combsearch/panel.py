"""Forecast panels: CSV loading, imputation, splitting, per-origin views.

A panel holds K forecaster predictions and one realization per period. CSV
schema: first column a date label, then K forecaster columns, last column the
realization. Blank cells and "NA" (any case) are missing. Date labels are
opaque strings that must sort lexicographically in time order (quarter labels
such as ``1999Q3`` do, for four-digit years).

Origins are 1-based throughout: the information set at origin ``t`` contains
history rows 1..t-1 and the current-period forecaster predictions (row t);
the realization of row t is never part of it.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ImputationError,
    PanelFormatError,
    PanelParseError,
    ValidationError,
)

_MISSING = {"", "na", "n/a", "nan"}

#: declared CSV formats -> (rows, forecasters) or None for unconstrained
FORMATS = {
    "original_70": (70, 23),
    "extended_106": (106, 23),
    "generic": None,
}

_EXTENDED_SEARCH_ROWS = 70


def _freeze(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Panel:
    """Immutable forecaster-by-time panel.

    Attributes
    ----------
    dates : tuple of str
        Strictly increasing period labels, one per row.
    X : ndarray, shape (T, K)
        Forecaster predictions; ``X[t, k]`` targets period ``t``.
    y : ndarray, shape (T,)
        Realizations (NaN where not yet observed).
    missing_mask : ndarray of bool, shape (T, K)
        True where a prediction was missing in the source.
    split : int
        0-based index of the first holdout row == number of search-sample
        rows; ``split == T`` means no holdout.
    names : tuple of str
        Forecaster column labels (may be empty).
    """

    dates: tuple
    X: np.ndarray
    y: np.ndarray
    missing_mask: np.ndarray
    split: int
    names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(str(d) for d in self.dates))
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float)
        if X.ndim != 2:
            raise ValidationError("X must be 2-dimensional")
        T, K = X.shape
        if K < 2:
            raise ValidationError(f"panel needs at least 2 forecasters, got {K}")
        if T < 2:
            raise ValidationError(f"panel needs at least 2 rows, got {T}")
        if y.shape != (T,):
            raise ValidationError(f"y shape {y.shape} does not match T={T}")
        if len(self.dates) != T:
            raise ValidationError(f"{len(self.dates)} dates for {T} rows")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise ValidationError(f"dates not strictly increasing: {a!r} !< {b!r}")
        mask = np.array(self.missing_mask, dtype=bool)
        if mask.shape != (T, K):
            raise ValidationError("missing_mask shape does not match X")
        if not (0 < self.split <= T):
            raise ValidationError(f"split must lie in (0, {T}], got {self.split}")
        if self.names and len(self.names) != K:
            raise ValidationError("names length does not match K")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "y", _freeze(y))
        object.__setattr__(self, "missing_mask", _freeze(mask))

    @property
    def T(self):
        return self.X.shape[0]

    @property
    def K(self):
        return self.X.shape[1]

    @property
    def has_holdout(self):
        return self.split < self.T

    def holdout_dates(self):
        """Date labels of the holdout rows (empty tuple when split == T)."""
        return self.dates[self.split:]


@dataclass(frozen=True)
class Info:
    """Per-origin information set handed to a combination method.

    All arrays are private copies; methods may scribble on them without
    touching the parent panel. ``X_train``/``y_train`` cover the 1-based rows
    max(1, t-w)..t-1, ``X_history``/``y_history`` the rows 1..t-1, and
    ``x_new`` holds the K current-period predictions (row t). No realization
    at or after row t is present.
    """

    X_train: np.ndarray
    y_train: np.ndarray
    X_history: np.ndarray
    y_history: np.ndarray
    x_new: np.ndarray
    lambda_grid: np.ndarray
    lambda_grid2: np.ndarray
    t: int
    w: int

    @property
    def K(self):
        return self.x_new.shape[0]

    @property
    def n_train(self):
        return self.X_train.shape[0]


def _parse_cell(token, line, column):
    token = token.strip()
    if token.lower() in _MISSING:
        return np.nan, True
    try:
        return float(token), False
    except ValueError:
        raise PanelParseError(f"cannot parse {token!r} as a number",
                              line=line, column=column) from None


def load_panel(path, fmt="generic"):
    """Read a panel CSV. Missing cells are flagged, not imputed.

    ``fmt`` selects dimension checks: ``original_70`` expects a 70x23 panel,
    ``extended_106`` a 106x23 panel whose last 36 rows form the holdout,
    ``generic`` accepts any shape. Decimal separator is ``.``; encoding UTF-8.
    """
    if fmt not in FORMATS:
        raise ValidationError(f"unknown format {fmt!r}; choose from {sorted(FORMATS)}")
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise PanelParseError(f"{path} has no data rows")
    header = rows[0]
    if len(header) < 4:
        raise PanelParseError("need at least date, two forecasters, realization",
                              line=1)
    ncol = len(header)
    K = ncol - 2
    dates, X, y, mask = [], [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != ncol:
            raise PanelParseError(f"expected {ncol} columns, got {len(row)}",
                                  line=lineno)
        dates.append(row[0].strip())
        xs, ms = [], []
        for c in range(1, ncol - 1):
            v, missing = _parse_cell(row[c], lineno, c + 1)
            xs.append(v)
            ms.append(missing)
        yv, _ = _parse_cell(row[-1], lineno, ncol)
        X.append(xs)
        mask.append(ms)
        y.append(yv)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    T = X.shape[0]

    expected = FORMATS[fmt]
    if expected is not None and (T, K) != expected:
        raise PanelFormatError(
            f"format {fmt!r} expects {expected[0]} rows x {expected[1]} "
            f"forecasters, file has {T} x {K}")
    split = _EXTENDED_SEARCH_ROWS if fmt == "extended_106" else T

    dead = np.flatnonzero(mask.all(axis=0))
    if dead.size:
        labels = [header[1 + k] if header[1 + k].strip() else str(k) for k in dead]
        warnings.warn(f"forecaster column(s) with no observations: {labels}",
                      stacklevel=2)
    return Panel(dates=tuple(dates), X=X, y=y, missing_mask=mask, split=split,
                 names=tuple(h.strip() for h in header[1:-1]))


def save_panel(panel, path):
    """Write a panel back to the CSV schema (NaN/masked cells -> blank)."""
    path = Path(path)
    names = panel.names or tuple(f"f{k+1}" for k in range(panel.K))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["date", *names, "realization"])
        for t in range(panel.T):
            row = [panel.dates[t]]
            for k in range(panel.K):
                cell = panel.X[t, k]
                row.append("" if (panel.missing_mask[t, k] or not np.isfinite(cell))
                           else repr(float(cell)))
            yv = panel.y[t]
            row.append("" if not np.isfinite(yv) else repr(float(yv)))
            out.writerow(row)
    return path


def impute_panel(panel):
    """Fill missing predictions; returns a new, missing-free panel.

    Interior gaps are linearly interpolated in row index per forecaster.
    Leading/trailing gaps and fully inactive forecasters take the
    cross-sectional mean of the forecasters observed at that date. Observed
    cells are never altered, so the operation is idempotent.
    """
    mask = panel.missing_mask
    if np.isnan(panel.y).any():
        bad = panel.dates[int(np.flatnonzero(np.isnan(panel.y))[0])]
        raise ImputationError(f"realizations must be fully observed (missing at {bad})")
    observed_per_row = (~mask).sum(axis=1)
    if (observed_per_row == 0).any():
        bad = panel.dates[int(np.argmin(observed_per_row))]
        raise ImputationError(f"no forecaster observed at {bad}")

    X = panel.X.copy()
    X[mask] = np.nan
    row_mean = np.nanmean(X, axis=1)

    filled = X.copy()
    idx = np.arange(panel.T)
    for k in range(panel.K):
        col = X[:, k]
        obs = np.flatnonzero(~np.isnan(col))
        if obs.size == 0:
            filled[:, k] = row_mean
            continue
        gaps = np.flatnonzero(np.isnan(col))
        if gaps.size == 0:
            continue
        interior = gaps[(gaps > obs[0]) & (gaps < obs[-1])]
        if interior.size:
            filled[interior, k] = np.interp(idx[interior], obs, col[obs])
        edges = gaps[(gaps < obs[0]) | (gaps > obs[-1])]
        if edges.size:
            filled[edges, k] = row_mean[edges]

    return Panel(dates=panel.dates, X=filled, y=panel.y,
                 missing_mask=np.zeros_like(mask), split=panel.split,
                 names=panel.names)


def split_panel(panel, boundary):
    """Cut at a date boundary; returns ``(search_panel, holdout_len)``.

    The search panel contains exactly the rows strictly before ``boundary``.
    ``boundary`` must be a panel date, or any label sorting after the last
    date (then the holdout is empty). The parent panel is untouched; use
    :func:`mark_split` to record the boundary on a full panel.
    """
    boundary = str(boundary)
    if boundary > panel.dates[-1]:
        n_search = panel.T
    elif boundary in panel.dates:
        n_search = panel.dates.index(boundary)
    else:
        raise ValidationError(f"boundary {boundary!r} outside the panel's date range")
    if n_search == 0:
        raise ValidationError(f"boundary {boundary!r} leaves no search rows")
    search = Panel(dates=panel.dates[:n_search], X=panel.X[:n_search],
                   y=panel.y[:n_search], missing_mask=panel.missing_mask[:n_search],
                   split=n_search, names=panel.names)
    return search, panel.T - n_search


def mark_split(panel, boundary):
    """Return the same panel with ``split`` set at the date boundary."""
    search, holdout_len = split_panel(panel, boundary)
    return Panel(dates=panel.dates, X=panel.X, y=panel.y,
                 missing_mask=panel.missing_mask, split=search.T,
                 names=panel.names)


def _check_grid(grid, name):
    grid = np.array(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0):
        raise ValidationError(f"{name} must be strictly positive and finite")
    if grid.size > 1 and not np.all(np.diff(grid) < 0):
        raise ValidationError(f"{name} must be strictly descending")
    return grid


def build_info(panel, t, w, grid, grid2=None):
    """Assemble the origin-``t`` information set (1-based ``t``, 2 <= t <= T).

    The training block is the trailing ``w``-row window of the history;
    everything is deep-copied so the caller may mutate freely.
    """
    if not isinstance(t, (int, np.integer)):
        raise ValidationError("origin t must be an integer")
    if t < 2:
        raise ValidationError(f"origin t={t} has no history (need t >= 2)")
    if t > panel.T:
        raise ValidationError(f"origin t={t} beyond panel length {panel.T}")
    if w < 1:
        raise ValidationError(f"window must be >= 1, got {w}")
    grid = _check_grid(grid, "lambda_grid")
    grid2 = grid.copy() if grid2 is None else _check_grid(grid2, "lambda_grid2")

    hist = slice(0, t - 1)
    train = slice(max(0, t - 1 - w), t - 1)
    return Info(
        X_train=panel.X[train].copy(),
        y_train=panel.y[train].copy(),
        X_history=panel.X[hist].copy(),
        y_history=panel.y[hist].copy(),
        x_new=panel.X[t - 1].copy(),
        lambda_grid=grid,
        lambda_grid2=grid2,
        t=int(t),
        w=int(w),
    )


def quarter_range(start, n):
    """``n`` consecutive quarter labels from ``start`` (e.g. "2010Q1")."""
    year, q = int(start[:4]), int(start[-1])
    if not 1 <= q <= 4:
        raise ValidationError(f"bad quarter label {start!r}")
    out = []
    for _ in range(int(n)):
        out.append(f"{year}Q{q}")
        q += 1
        if q == 5:
            year, q = year + 1, 1
    return tuple(out)


def synthetic_panel(T=48, K=7, seed=0, start="2010Q1"):
    """Deterministic artificial panel for demos and data-free testing.

    A smooth trend-plus-cycle target with K noisy forecasters of varying
    bias and accuracy. Fully reproducible given (T, K, seed).
    """
    if T < 2 or K < 2:
        raise ValidationError("synthetic panel needs T >= 2 and K >= 2")
    rng = np.random.default_rng(seed)
    t = np.arange(T, dtype=float)
    truth = 0.04 * t + np.sin(t / 4.0) + 0.3 * np.cos(t / 9.0)
    bias = rng.normal(0.0, 0.25, K)
    sd = 0.2 + 0.5 * rng.random(K)
    X = truth[:, None] + bias[None, :] + rng.normal(0, 1, (T, K)) * sd[None, :]
    y = truth + rng.normal(0.0, 0.15, T)
    return Panel(dates=quarter_range(start, T), X=X, y=y,
                 missing_mask=np.zeros((T, K), dtype=bool), split=T)
