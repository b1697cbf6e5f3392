"""Equal-forecast-accuracy test with a fixed-smoothing variance estimator.

The loss differential (benchmark squared error minus method squared error)
is projected onto a small number of low-frequency cosine basis functions;
the average squared projection estimates the long-run variance. With B
basis functions the studentized mean is compared to a t distribution with
B degrees of freedom, which keeps size honest in the short samples typical
of quarterly evaluation windows. One-sided: large positive statistics mean
the method beats the benchmark.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import stats

from .errors import ValidationError


class DMResult(NamedTuple):
    stat: float
    p_value: float
    n_basis: int
    degenerate: bool


def default_basis_count(n):
    """Nearest even integer to 0.4 * n^(2/3), clamped into [2, n-1]."""
    raw = 0.4 * float(n) ** (2.0 / 3.0)
    b = 2 * int(round(raw / 2.0))
    return int(min(max(b, 2), n - 1))


def cosine_basis(n, n_basis):
    """Type-II DCT rows: sqrt(2/n) * cos(pi * j * (t - 1/2) / n), j=1..B."""
    t = np.arange(1, n + 1, dtype=float)
    j = np.arange(1, n_basis + 1, dtype=float)
    return np.sqrt(2.0 / n) * np.cos(np.pi * np.outer(j, (t - 0.5) / n))


def dm_test_ewc(errors_benchmark, errors_method, n_basis=None):
    """Test whether the method's squared errors beat the benchmark's.

    Positive stat = method better. Returns the one-sided p-value against
    a t distribution with as many degrees of freedom as basis functions.
    A zero variance estimate (constant differential, e.g. identical error
    series) is flagged degenerate and reported as stat 0, p 0.5.
    """
    eb = np.asarray(errors_benchmark, dtype=float)
    em = np.asarray(errors_method, dtype=float)
    if eb.shape != em.shape or eb.ndim != 1:
        raise ValidationError("error series must be matched 1-d arrays")
    n = eb.size
    if n < 3:
        raise ValidationError(f"need at least 3 paired errors, got {n}")
    if not (np.all(np.isfinite(eb)) and np.all(np.isfinite(em))):
        raise ValidationError("error series must be finite")
    d = eb ** 2 - em ** 2
    b = default_basis_count(n) if n_basis is None else int(n_basis)
    if not 1 <= b <= n - 1:
        raise ValidationError(f"n_basis must lie in [1, {n - 1}], got {b}")
    proj = cosine_basis(n, b) @ d
    omega = float((proj ** 2).mean())
    dbar = float(d.mean())
    if omega <= 0.0:
        return DMResult(0.0, 0.5, b, True)
    stat = dbar / np.sqrt(omega / n)
    p = float(stats.t.sf(stat, df=b))
    return DMResult(float(stat), p, b, False)
