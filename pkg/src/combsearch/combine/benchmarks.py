"""Baseline combiners: equal weights, single best, exhaustive small subsets."""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import ValidationError
from .base import Forecast, SubsetChoice

_CHUNK = 20_000  # subset rows per vectorized block; bounds peak memory


def simple_average(info):
    """Equal-weight mean of the K current predictions."""
    return Forecast(float(np.mean(info.x_new)), "simple_average")


def best_individual(info):
    """Forecaster with the lowest training-window RMSE (ties: lowest index)."""
    resid = info.y_train[:, None] - info.X_train
    rmse = np.sqrt((resid * resid).mean(axis=0))
    k = int(np.argmin(rmse))
    return Forecast(float(info.x_new[k]), "best_individual")


def _best_subset_for_window(Xw, yw, n_max):
    """Best (rmse, size, combo) over all non-empty subsets of size <= n_max."""
    n, K = Xw.shape
    best = None
    for size in range(1, min(n_max, K) + 1):
        combos = itertools.combinations(range(K), size)
        while True:
            block = list(itertools.islice(combos, _CHUNK))
            if not block:
                break
            arr = np.array(block, dtype=np.intp)
            preds = Xw[:, arr].mean(axis=2)
            err = preds - yw[:, None]
            rmse = np.sqrt((err * err).mean(axis=0))
            i = int(np.argmin(rmse))  # first min = lexicographically smallest
            cand = (float(rmse[i]), size, tuple(int(j) for j in arr[i]))
            if best is None or cand < best:
                best = cand
    return best


def best_subset_average(info, n_max, window_candidates=None):
    """Equal-weight average over the best-scoring small subset.

    Enumerates every non-empty subset of at most ``n_max`` forecasters and
    scores its equal-weight average on the training window. With
    ``window_candidates``, each candidate length w means the most recent w
    rows of the history (clipped to what exists); without, the training
    window is used as is. Ties resolve to the smaller subset, then the
    lexicographically smallest index tuple, then the longer window.

    Returns ``(Forecast, SubsetChoice)``.
    """
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}")
    if window_candidates is None:
        windows = [info.n_train]
        source = info.X_train, info.y_train
    else:
        lengths = sorted({min(int(w), len(info.y_history))
                          for w in window_candidates if int(w) >= 1},
                         reverse=True)
        if not lengths:
            raise ValidationError("no usable window candidates")
        windows = lengths
        source = info.X_history, info.y_history

    Xs, ys = source
    best = None  # (rmse, size, combo, -window)
    for w in windows:
        Xw = Xs[len(ys) - w:]
        yw = ys[len(ys) - w:]
        r = _best_subset_for_window(Xw, yw, n_max)
        cand = (r[0], r[1], r[2], -w)
        if best is None or cand < best:
            best = cand
    rmse, size, combo, neg_w = best
    choice = SubsetChoice(indices=combo, window=-neg_w, rmse=rmse)
    value = float(np.mean(info.x_new[list(combo)]))
    return Forecast(value, "subset_average"), choice
