"""Prototype energy: attachment, semantic tension and margin repulsion.

All terms use the squared weighted distance of :mod:`protometric.metric`.
Repulsion sums over *ordered* prototype pairs, so every unordered pair is
counted twice; halve ``lambda2`` to get the unordered convention.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DataError, GraphError, ShapeError
from .metric import Metric

COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class Hyperparams:
    lambda1: float = 0.1
    lambda2: float = 0.01
    margin: float = 1.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "margin"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ConfigError("lambda1 and lambda2 must be non-negative")
        if self.margin <= 0:
            raise ConfigError("margin must be positive")


@dataclass(frozen=True)
class Dataset:
    """Labeled feature vectors: ``features[m]`` belongs to class ``labels[m]``."""

    labels: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise ShapeError(f"features must be a 2-D array, got shape {features.shape}")
        if labels.size != features.shape[0]:
            raise ShapeError(
                f"{labels.size} labels for {features.shape[0]} feature vectors"
            )
        if not np.all(np.isfinite(features)):
            raise DataError("features contain non-finite values")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)

    def __len__(self):
        return self.labels.size

    @property
    def dim(self):
        return self.features.shape[1]


@dataclass(frozen=True)
class Section:
    """One prototype per class: row ``c`` of ``prototypes`` is class ``c``."""

    prototypes: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.prototypes, dtype=np.float64)
        if P.ndim != 2:
            raise ShapeError(f"prototypes must be a 2-D array, got shape {P.shape}")
        object.__setattr__(self, "prototypes", P)

    @property
    def n_classes(self):
        return self.prototypes.shape[0]

    @property
    def dim(self):
        return self.prototypes.shape[1]

    def __getitem__(self, class_id):
        return self.prototypes[class_id]


class EnergyTerms(NamedTuple):
    total: float
    attachment: float
    tension: float
    repulsion: float


def _as_arrays(data, s, g):
    P = s.prototypes if isinstance(s, Section) else np.asarray(s, dtype=np.float64)
    a = g.weights if isinstance(g, Metric) else np.asarray(g, dtype=np.float64)
    if data is not None:
        if len(data) == 0:
            raise DataError("empty dataset")
        if data.dim != P.shape[1]:
            raise ShapeError(f"feature dimension {data.dim} != prototype dimension {P.shape[1]}")
        if data.labels.min() < 0 or data.labels.max() >= P.shape[0]:
            raise DataError("dataset label outside the section's classes")
    if a.size != P.shape[1]:
        raise ShapeError(f"metric dimension {a.size} != prototype dimension {P.shape[1]}")
    return P, a


def _edges(graph, n):
    src, dst, w = graph.arrays()
    if src.size and (max(src.max(), dst.max()) >= n):
        raise GraphError("graph edge references a class without a prototype")
    return src, dst, w


def _pair_geometry(P, a):
    """Differences, distances and hinge activity over ordered pairs ``i != j``."""
    diff = P[:, None, :] - P[None, :, :]
    dist = np.sqrt(np.einsum("ijk,k,ijk->ij", diff, a, diff))
    return diff, dist


def attachment_energy(data, s, g):
    """Mean squared distance of each sample to its class prototype."""
    P, a = _as_arrays(data, s, g)
    diff = data.features - P[data.labels]
    return float(np.sum((diff * diff) @ a) / len(data))


def tension_energy(s, graph, g):
    """Edge-weighted squared distance between semantically linked prototypes."""
    P, a = _as_arrays(None, s, g)
    src, dst, w = _edges(graph, P.shape[0])
    if not src.size:
        return 0.0
    diff = P[src] - P[dst]
    return float(np.dot(w, (diff * diff) @ a))


def repulsion_energy(s, g, margin):
    P, a = _as_arrays(None, s, g)
    _, dist = _pair_geometry(P, a)
    hinge = np.maximum(0.0, margin - dist)
    np.fill_diagonal(hinge, 0.0)
    return float(np.sum(hinge * hinge))


def energy_terms(data, s, g, graph, hp):
    att = attachment_energy(data, s, g)
    ten = tension_energy(s, graph, g)
    rep = repulsion_energy(s, g, hp.margin)
    return EnergyTerms(att + hp.lambda1 * ten + hp.lambda2 * rep, att, ten, rep)


def total_energy(data, s, g, graph, hp):
    return energy_terms(data, s, g, graph, hp).total


def _active_pairs(P, a, margin):
    diff, dist = _pair_geometry(P, a)
    hinge = np.maximum(0.0, margin - dist)
    np.fill_diagonal(hinge, 0.0)
    # coincident prototypes: push direction undefined, contribute nothing
    coef = np.where(dist > COINCIDENT_TOL, hinge / np.where(dist > 0, dist, 1.0), 0.0)
    return diff, coef


def grad_section(data, s, g, graph, hp):
    """Gradient of the total energy w.r.t. every prototype, shape ``(N, d)``."""
    P, a = _as_arrays(data, s, g)
    grad = np.zeros_like(P)

    resid = P[data.labels] - data.features
    np.add.at(grad, data.labels, (2.0 / len(data)) * resid * a)

    src, dst, w = _edges(graph, P.shape[0])
    if src.size and hp.lambda1:
        pull = 2.0 * hp.lambda1 * w[:, None] * (P[src] - P[dst]) * a
        np.add.at(grad, src, pull)
        np.add.at(grad, dst, -pull)

    if hp.lambda2:
        diff, coef = _active_pairs(P, a, hp.margin)
        # ordered pairs (i, j) and (j, i) both move prototype i
        grad -= 4.0 * hp.lambda2 * np.einsum("ij,ijk->ik", coef, diff) * a
    return grad


def grad_theta(data, s, g, graph, hp):
    """Gradient of the total energy w.r.t. the log-weights ``theta``."""
    P, a = _as_arrays(data, s, g)
    resid = data.features - P[data.labels]
    per_dim = np.sum(resid * resid, axis=0) / len(data)

    src, dst, w = _edges(graph, P.shape[0])
    if src.size and hp.lambda1:
        diff = P[src] - P[dst]
        per_dim = per_dim + hp.lambda1 * (w @ (diff * diff))

    if hp.lambda2:
        diff, coef = _active_pairs(P, a, hp.margin)
        per_dim = per_dim - hp.lambda2 * np.einsum("ij,ijk->k", coef, diff * diff)
    return a * per_dim
