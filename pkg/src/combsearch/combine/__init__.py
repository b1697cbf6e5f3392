"""Forecast combination methods and their registry.

Every real-time method is registered under a stable name so evaluators and
the CLI can instantiate it from a string plus an optional parameter dict.
The ex-post penalty search is exposed as plain functions only: it looks at
realized outcomes, so it cannot masquerade as a real-time method.
"""

from __future__ import annotations

from .base import (
    ALIASES,
    Forecast,
    ForecastMethod,
    SubsetChoice,
    canonical_name,
    create_method,
    fallback_simple_average,
    inverse_power_weights,
    method_names,
    register_factory,
    registry,
    weighted_quantile,
)
from .benchmarks import best_individual, best_subset_average, simple_average
from .pelasso import (
    ExPostResult,
    expost_pelasso,
    pelasso_fixed,
    pelasso_two_step,
)
from .run1 import run1, run1a, run1b
from .run2 import run2, run2a, run2b, temporal_weights
from .run3 import run3, run3a, run3b

__all__ = [
    "ALIASES",
    "ExPostResult",
    "Forecast",
    "ForecastMethod",
    "SubsetChoice",
    "best_individual",
    "best_subset_average",
    "canonical_name",
    "create_method",
    "expost_pelasso",
    "fallback_simple_average",
    "inverse_power_weights",
    "method_names",
    "pelasso_fixed",
    "pelasso_two_step",
    "register_factory",
    "registry",
    "run1", "run1a", "run1b",
    "run2", "run2a", "run2b",
    "run3", "run3a", "run3b",
    "temporal_weights",
    "simple_average",
    "weighted_quantile",
]

_SUBSET_WINDOWS = tuple(range(1, 41))


def _simple(name, fn):
    def factory(**params):
        if params:
            bound = dict(params)
            return ForecastMethod(name, lambda info: fn(info, **bound), bound)
        return ForecastMethod(name, fn)
    register_factory(name, factory)


def _subset(name, **defaults):
    def factory(**params):
        bound = {**defaults, **params}
        return ForecastMethod(
            name, lambda info: best_subset_average(info, **bound)[0], bound)
    register_factory(name, factory)


def _parameterized(name, fn):
    def factory(**params):
        bound = dict(params)
        return ForecastMethod(name, lambda info: fn(info, **bound), bound)
    register_factory(name, factory)


_simple("simple_average", simple_average)
_simple("best_individual", best_individual)
_subset("best_le6_avg", n_max=6)
_subset("best_le6_le40_avg", n_max=6, window_candidates=_SUBSET_WINDOWS)
for _name, _fn in [("run1", run1), ("run1a", run1a), ("run1b", run1b),
                   ("run2", run2), ("run2a", run2a), ("run2b", run2b),
                   ("run3", run3), ("run3a", run3a), ("run3b", run3b)]:
    _parameterized(_name, _fn)
del _name, _fn
