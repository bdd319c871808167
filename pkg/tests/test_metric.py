import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from protometric.errors import ParameterError, ShapeError
from protometric.metric import (
    Metric,
    MetricParams,
    distance,
    distance_squared,
    metric_from_theta,
    pairwise_distance_squared,
)


def test_metric_from_theta_examples():
    np.testing.assert_array_equal(metric_from_theta(MetricParams.zeros(4)).weights, np.ones(4))
    np.testing.assert_allclose(metric_from_theta(MetricParams(np.array([math.log(2), 0]))).weights, [2, 1])
    assert metric_from_theta(np.array([-1.0])).weights[0] == pytest.approx(0.367879, abs=1e-6)


def test_theta_is_clamped():
    w = metric_from_theta(np.array([100.0, -100.0])).weights
    assert w[0] == math.exp(30) and w[1] == math.exp(-30)


def test_non_finite_theta():
    with pytest.raises(ParameterError):
        metric_from_theta(np.array([0.0, np.inf]))


def test_distance_examples():
    eye = Metric(np.ones(2))
    assert distance([0, 0], [3, 4], eye) == 5.0
    assert distance_squared([0, 0], [3, 4], eye) == 25.0
    assert distance([0, 0], [1, 1], Metric(np.array([4.0, 1.0]))) == pytest.approx(2.2360680, abs=1e-7)
    assert distance_squared([1, 1], [0, 0], Metric(np.array([2.0, 3.0]))) == 5.0
    v = np.array([0.3, -1.2])
    assert distance(v, v, eye) == 0.0
    assert distance_squared(v, v, eye) == 0.0


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        distance([0, 0, 0], [1, 1], Metric(np.ones(2)))
    with pytest.raises(ShapeError):
        distance([0, 0], [1, 1], Metric(np.ones(3)))


def test_pairwise_matches_loop(rng):
    P = rng.normal(size=(6, 5))
    g = Metric(rng.uniform(0.1, 3, size=5))
    D2 = pairwise_distance_squared(P, g)
    for i in range(6):
        for j in range(6):
            assert D2[i, j] == pytest.approx(sum(g.weights * (P[i] - P[j]) ** 2), rel=1e-13)


vectors = st.integers(1, 16).flatmap(
    lambda d: st.tuples(
        *[arrays(np.float64, d, elements=st.floats(-100, 100)) for _ in range(3)],
        arrays(np.float64, d, elements=st.floats(-5, 5)),
    )
)


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_metric_axioms(sample):
    x, y, z, theta = sample
    g = metric_from_theta(theta)
    dxy, dyx = distance(x, y, g), distance(y, x, g)
    assert dxy >= 0
    assert dxy == dyx
    assert distance(x, x, g) == 0
    scale = max(dxy, distance(y, z, g), distance(x, z, g), 1e-300)
    assert distance(x, z, g) <= distance(x, y, g) + distance(y, z, g) + 1e-12 * scale
    assert dxy**2 == pytest.approx(distance_squared(x, y, g), rel=1e-12, abs=1e-300)
    if not np.array_equal(x, y):
        assert distance_squared(x, y, g) > 0 or np.all(np.abs(x - y) < 1e-150)


@settings(max_examples=100, deadline=None)
@given(vectors, st.sampled_from([0.1, 1.0, 10.0, 3.7]))
def test_uniform_scaling_law(sample, c):
    x, y, _, theta = sample
    g = metric_from_theta(theta)
    assert distance(x, y, g.scaled(c)) == pytest.approx(math.sqrt(c) * distance(x, y, g), rel=1e-12)
