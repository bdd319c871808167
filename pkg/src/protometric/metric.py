"""Diagonal metric on feature space, parameterized by log-weights."""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError

THETA_BOUND = 30.0


def clamp_theta(theta):
    return np.clip(np.asarray(theta, dtype=np.float64), -THETA_BOUND, THETA_BOUND)


@dataclass(frozen=True)
class MetricParams:
    """Unconstrained log-weights ``theta``; weights are ``exp(theta)``."""

    theta: np.ndarray

    @classmethod
    def zeros(cls, dim):
        return cls(np.zeros(int(dim)))

    @property
    def dim(self):
        return np.asarray(self.theta).size


@dataclass(frozen=True)
class Metric:
    weights: np.ndarray

    @property
    def dim(self):
        return self.weights.size

    def scaled(self, c):
        """Same metric with every weight multiplied by ``c > 0``."""
        return Metric(self.weights * float(c))


def metric_from_theta(params):
    """Positive weights ``exp(clip(theta, -30, 30))``."""
    theta = params.theta if isinstance(params, MetricParams) else params
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise ParameterError("metric parameters contain non-finite values")
    return Metric(np.exp(clamp_theta(theta)))


def _weights(g):
    return g.weights if isinstance(g, Metric) else np.asarray(g, dtype=np.float64)


def _check(v1, v2, a):
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if not (v1.shape[-1] == v2.shape[-1] == a.shape[-1]):
        raise ShapeError(
            f"dimension mismatch: {v1.shape[-1]}, {v2.shape[-1]} vs metric {a.shape[-1]}"
        )
    return v1, v2


def distance_squared(v1, v2, g):
    """Weighted squared distance ``sum_i a_i (v1_i - v2_i)**2``.

    Broadcasts over leading axes.  The sum runs left to right over the last
    axis so results do not depend on BLAS blocking.
    """
    a = _weights(g)
    v1, v2 = _check(v1, v2, a)
    diff = v1 - v2
    terms = a * diff * diff
    out = np.zeros(terms.shape[:-1])
    for i in range(terms.shape[-1]):
        out = out + terms[..., i]
    return out if out.ndim else float(out)


def distance(v1, v2, g):
    return np.sqrt(distance_squared(v1, v2, g))


def pairwise_distance_squared(points, g):
    """Matrix of squared distances between the rows of `points`."""
    points = np.asarray(points, dtype=np.float64)
    return distance_squared(points[:, None, :], points[None, :, :], g)
