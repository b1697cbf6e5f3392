"""Shared combiner machinery: forecast records, registry, weighted quantile."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ..errors import ValidationError


class Forecast(NamedTuple):
    """A point forecast plus the label actually used to produce it.

    The label equals the method name on the primary path and gains a bracket
    suffix (e.g. ``[fallback=simple_average]``, ``[cv=loo]``) whenever a
    fallback or downgrade fired, so logs show which rule made the number.
    """

    value: float
    label: str


@dataclass(frozen=True)
class ForecastMethod:
    """A named, parameterized map from an information set to a Forecast."""

    name: str
    fn: Callable
    params: dict = field(default_factory=dict)

    def __call__(self, info):
        return self.fn(info)

    def forecast(self, info):
        return self.fn(info)


class SubsetChoice(NamedTuple):
    """Winning forecaster subset of an enumeration search."""

    indices: tuple
    window: int
    rmse: float


def weighted_quantile(values, weights, q):
    """Quantile of ``values`` at cumulative normalized weight ``q``.

    Linear interpolation of the weighted empirical CDF evaluated at grid
    points ``cum(w)_i - (1-q) * w_i`` over the sorted values; under equal
    weights this reproduces the standard interpolated quantile (numpy's
    default). Clamps to the extreme order statistics outside the grid.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.ndim != 1 or weights.shape != values.shape or values.size == 0:
        raise ValidationError("values and weights must be matched non-empty 1-d arrays")
    if not np.all(np.isfinite(values)):
        raise ValidationError("values must be finite")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise ValidationError("weights must be finite and >= 0")
    total = weights.sum()
    if total <= 0:
        raise ValidationError("weights must not all be zero")
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"quantile must lie in [0, 1], got {q}")
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order] / total
    grid = np.cumsum(w) - (1.0 - q) * w
    return float(np.interp(q, grid, v))


def inverse_power_weights(scores, power):
    """Normalized weights proportional to ``scores**(-power)``.

    A zero score would be an infinite weight; the weight vector then
    degenerates to an indicator on the zero-score entries (equal split),
    keeping the output finite and deterministic.
    """
    scores = np.asarray(scores, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        w = scores ** (-float(power))
    if np.any(np.isinf(w)):
        w = np.where(np.isinf(w), 1.0, 0.0)
    w = w / w.max()
    return w / w.sum()


def fallback_simple_average(info, label):
    """Equal-weight mean of the current predictions, labelled as a fallback."""
    return Forecast(float(np.mean(info.x_new)), f"{label}[fallback=simple_average]")


_FACTORIES: dict[str, Callable[..., ForecastMethod]] = {}

#: accepted spellings -> canonical registry keys
ALIASES = {
    "run1.final": "run1",
    "run2.final": "run2",
    "run3.final": "run3",
}


def register_factory(name, factory):
    if name in _FACTORIES:
        raise ValidationError(f"method {name!r} already registered")
    _FACTORIES[name] = factory
    return factory


def canonical_name(name):
    name = str(name).strip()
    return ALIASES.get(name, name)


def create_method(name, params=None):
    """Instantiate a registered method, optionally overriding parameters."""
    key = canonical_name(name)
    if key not in _FACTORIES:
        known = ", ".join(sorted(_FACTORIES))
        raise ValidationError(f"unknown method {name!r}; registered: {known}")
    return _FACTORIES[key](**(params or {}))


def registry():
    """All registered methods with their default parameters, keyed by name."""
    return {name: factory() for name, factory in sorted(_FACTORIES.items())}


def method_names():
    return sorted(_FACTORIES)
