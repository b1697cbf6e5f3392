"""Weighted quantile and inverse-power weighting primitives.

Oracle: an explicit bracketing loop over the weighted-CDF grid points
c_i = cum(w)_i - (1-q) * w_i (sorted values, normalized weights), clamping to
the extreme order statistics outside the grid. Written without np.interp so
the production code is checked against an independent formulation.
"""

import numpy as np
import pytest

from combsearch import ValidationError, weighted_quantile
from combsearch.combine import fallback_simple_average, inverse_power_weights


def quantile_oracle(values, weights, q):
    order = np.argsort(values, kind="stable")
    v = np.asarray(values, float)[order]
    w = np.asarray(weights, float)[order]
    w = w / w.sum()
    grid = np.cumsum(w) - (1.0 - q) * w
    if q <= grid[0]:
        return float(v[0])
    if q >= grid[-1]:
        return float(v[-1])
    i = 0
    while not (grid[i] <= q <= grid[i + 1]):
        i += 1
    if grid[i + 1] == grid[i]:
        return float(v[i])
    frac = (q - grid[i]) / (grid[i + 1] - grid[i])
    return float(v[i] + frac * (v[i + 1] - v[i]))


def test_matches_oracle_on_random_cases():
    rng = np.random.default_rng(41)
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        v = rng.normal(size=n) * 10
        w = rng.random(n) + (rng.random(n) < 0.7) * 0.01  # some near-zero
        q = float(rng.random())
        assert weighted_quantile(v, w, q) == pytest.approx(
            quantile_oracle(v, w, q), abs=1e-12)


def test_equal_weights_reproduce_numpy_quantile():
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = int(rng.integers(2, 15))
        v = rng.normal(size=n)
        q = float(rng.random())
        assert weighted_quantile(v, np.ones(n), q) == pytest.approx(
            float(np.quantile(v, q)), abs=1e-12)


def test_edges_and_degenerate_inputs():
    v = np.array([3.0, 1.0, 2.0])
    w = np.array([1.0, 1.0, 1.0])
    assert weighted_quantile(v, w, 0.0) == 1.0
    assert weighted_quantile(v, w, 1.0) == 3.0
    assert weighted_quantile(np.array([5.0]), np.array([2.0]), 0.37) == 5.0
    # all the mass on one value: that value at (almost) every quantile —
    # w pairs with v elementwise, so the mass here sits on v[1] == 1.0
    w1 = np.array([0.0, 1.0, 0.0])
    for q in (0.1, 0.5, 0.9):
        assert weighted_quantile(v, w1, q) == pytest.approx(1.0, abs=1e-12)


def test_zero_weight_values_are_interior_knots():
    # a zero-weight value still shapes the CDF as an interpolation knot:
    # v=(1,2,3), w=(.5,0,.5) puts grid points at (q/2, 1/2, (1+q)/2), so
    # q=0.25 interpolates 1 -> 2 at fraction (0.25-0.125)/0.375 = 1/3
    got = weighted_quantile(np.array([1.0, 2.0, 3.0]),
                            np.array([0.5, 0.0, 0.5]), 0.25)
    assert got == pytest.approx(4.0 / 3.0, abs=1e-12)


def test_quantile_validation():
    v = np.array([1.0, 2.0])
    w = np.array([1.0, 1.0])
    with pytest.raises(ValidationError):
        weighted_quantile(v, np.array([1.0]), 0.5)
    with pytest.raises(ValidationError):
        weighted_quantile(np.array([]), np.array([]), 0.5)
    with pytest.raises(ValidationError):
        weighted_quantile(np.array([1.0, np.nan]), w, 0.5)
    with pytest.raises(ValidationError):
        weighted_quantile(v, np.array([1.0, -0.1]), 0.5)
    with pytest.raises(ValidationError):
        weighted_quantile(v, np.array([0.0, 0.0]), 0.5)
    with pytest.raises(ValidationError):
        weighted_quantile(v, w, 1.2)


def test_inverse_power_weights_frozen_case():
    # scores (1, 2, 4) at power 2 -> raw (1, 1/4, 1/16) -> (16, 4, 1)/21
    got = inverse_power_weights(np.array([1.0, 2.0, 4.0]), 2)
    np.testing.assert_allclose(got, np.array([16.0, 4.0, 1.0]) / 21.0,
                               rtol=1e-14)
    assert got.sum() == pytest.approx(1.0, abs=1e-15)


def test_inverse_power_weights_zero_scores_degenerate_to_indicator():
    got = inverse_power_weights(np.array([0.0, 1.0, 0.0]), 3)
    np.testing.assert_array_equal(got, [0.5, 0.0, 0.5])


def test_inverse_power_weights_power_zero_is_uniform():
    got = inverse_power_weights(np.array([3.0, 9.0, 27.0, 81.0]), 0)
    np.testing.assert_allclose(got, np.full(4, 0.25), rtol=1e-15)


def test_fallback_label_and_value(info_mid):
    f = fallback_simple_average(info_mid, "somerun")
    assert f.label == "somerun[fallback=simple_average]"
    assert f.value == pytest.approx(float(np.mean(info_mid.x_new)), abs=0)
