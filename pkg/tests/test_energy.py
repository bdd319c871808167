import math

import numpy as np
import pytest

from protometric.energy import (
    Dataset,
    Hyperparams,
    Section,
    attachment_energy,
    energy_terms,
    grad_section,
    grad_theta,
    repulsion_energy,
    tension_energy,
    total_energy,
)
from protometric.errors import ConfigError, DataError, GraphError
from protometric.metric import Metric, MetricParams, metric_from_theta
from protometric.semgraph import SemanticGraph

from conftest import random_instance

EYE2 = Metric(np.ones(2))
FD_STEP = 1e-6


# -- independent oracles ------------------------------------------------------

def naive_energy(data, P, theta, graph, hp):
    a = [math.exp(t) for t in theta]
    d = len(a)

    def d2(u, v):
        return sum(a[k] * (u[k] - v[k]) ** 2 for k in range(d))

    att = sum(d2(x, P[c]) for c, x in zip(data.labels, data.features)) / len(data)
    ten = sum(w * d2(P[i], P[j]) for i, j, w in graph.edges)
    rep = 0.0
    for i in range(len(P)):
        for j in range(len(P)):
            if i != j:
                rep += max(0.0, hp.margin - math.sqrt(d2(P[i], P[j]))) ** 2
    return att + hp.lambda1 * ten + hp.lambda2 * rep


def fd_grad_section(data, P, theta, graph, hp):
    G = np.zeros_like(P)
    for idx in np.ndindex(P.shape):
        up, dn = P.copy(), P.copy()
        up[idx] += FD_STEP
        dn[idx] -= FD_STEP
        G[idx] = (naive_energy(data, up, theta, graph, hp) - naive_energy(data, dn, theta, graph, hp)) / (2 * FD_STEP)
    return G


def fd_grad_theta(data, P, theta, graph, hp):
    G = np.zeros_like(theta)
    for k in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[k] += FD_STEP
        dn[k] -= FD_STEP
        G[k] = (naive_energy(data, P, up, graph, hp) - naive_energy(data, P, dn, graph, hp)) / (2 * FD_STEP)
    return G


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)


def away_from_kinks(P, theta, margin):
    a = np.exp(theta)
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            d = math.sqrt(np.sum(a * (P[i] - P[j]) ** 2))
            if d < 1e-6 or abs(d - margin) < 1e-3:
                return False
    return True


def kink_free_instances(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng)
        data, s, params, graph, hp = inst
        if away_from_kinks(s.prototypes, params.theta, hp.margin):
            out.append(inst)
    return out


# -- worked examples ----------------------------------------------------------

def test_attachment_examples():
    one = Dataset([0], [[1.0, 0.0]])
    assert attachment_energy(one, Section([[1.0, 0.0]]), EYE2) == 0.0
    assert attachment_energy(one, Section([[0.0, 0.0]]), EYE2) == 1.0
    two = Dataset([0, 0], [[0.0, 0.0], [2.0, 0.0]])
    assert attachment_energy(two, Section([[1.0, 0.0]]), EYE2) == 1.0


def test_empty_dataset():
    with pytest.raises(DataError):
        attachment_energy(Dataset(np.zeros(0, int), np.zeros((0, 2))), Section([[0.0, 0.0]]), EYE2)


def test_tension_examples():
    g = SemanticGraph(((0, 1, 1.0),), 2)
    assert tension_energy(Section([[0.0, 0.0], [0.0, 2.0]]), g, EYE2) == 4.0
    assert tension_energy(Section([[0.5, 0.5], [0.5, 0.5]]), g, EYE2) == 0.0
    with pytest.raises(GraphError):
        tension_energy(Section([[0.0, 0.0], [0.0, 2.0]]), SemanticGraph(((0, 2, 1.0),), 3), EYE2)


def test_repulsion_examples():
    assert repulsion_energy(Section([[0.0, 0.0], [3.0, 0.0]]), EYE2, 1.0) == 0.0
    assert repulsion_energy(Section([[1.0, 1.0], [1.0, 1.0]]), EYE2, 1.0) == 2.0
    assert repulsion_energy(Section([[0.0, 0.0], [0.5, 0.0]]), EYE2, 1.0) == 0.5


def test_tension_matches_naive_double_loop():
    rng = np.random.default_rng(5)
    data, s, params, graph, _ = random_instance(rng, n=5)
    a = metric_from_theta(params).weights
    W = graph.adjacency_matrix()
    expected = 0.0
    for i in range(5):
        for j in range(5):
            if W[i, j]:
                expected += W[i, j] * sum(a * (s[i] - s[j]) ** 2)
    assert tension_energy(s, graph, metric_from_theta(params)) == pytest.approx(expected, rel=1e-12)


def test_total_energy_examples():
    rng = np.random.default_rng(7)
    data, s, params, graph, hp = random_instance(rng)
    g = metric_from_theta(params)
    bare = Hyperparams(0.0, 0.0, 1.0)
    assert total_energy(data, s, g, graph, bare) == attachment_energy(data, s, g)

    terms = energy_terms(data, s, g, graph, hp)
    recomposed = (
        attachment_energy(data, s, g)
        + hp.lambda1 * tension_energy(s, graph, g)
        + hp.lambda2 * repulsion_energy(s, g, hp.margin)
    )
    assert terms.total == pytest.approx(recomposed, rel=1e-12)
    assert terms.total == pytest.approx(naive_energy(data, s.prototypes, params.theta, graph, hp), rel=1e-12)

    P = np.array([[0.0, 0.0], [5.0, 0.0]])
    on = Dataset([0, 1], P)
    assert total_energy(on, Section(P), EYE2, SemanticGraph(((0, 1, 1.0),), 2), Hyperparams(0.0, 1.0, 1.0)) == 0.0


def test_hyperparam_validation():
    with pytest.raises(ConfigError):
        Hyperparams(margin=0.0)
    with pytest.raises(ConfigError):
        Hyperparams(lambda1=-1.0)


# -- gradients ----------------------------------------------------------------

@pytest.mark.parametrize("inst", kink_free_instances(25, seed=11))
def test_gradients_match_finite_differences(inst):
    data, s, params, graph, hp = inst
    g = metric_from_theta(params)
    P, theta = s.prototypes, params.theta
    assert rel_err(grad_section(data, s, g, graph, hp), fd_grad_section(data, P, theta, graph, hp)) < 1e-5
    assert rel_err(grad_theta(data, s, g, graph, hp), fd_grad_theta(data, P, theta, graph, hp)) < 1e-5


def test_gradient_small_instance_n3_d4_m6():
    rng = np.random.default_rng(3)
    while True:
        data, s, params, graph, hp = random_instance(rng, n=3, d=4, m=6)
        if away_from_kinks(s.prototypes, params.theta, hp.margin):
            break
    g = metric_from_theta(params)
    assert rel_err(grad_section(data, s, g, graph, hp),
                   fd_grad_section(data, s.prototypes, params.theta, graph, hp)) < 1e-5
    assert rel_err(grad_theta(data, s, g, graph, hp),
                   fd_grad_theta(data, s.prototypes, params.theta, graph, hp)) < 1e-5


def test_zero_gradient_at_class_mean():
    X = np.array([[1.0, 2.0], [3.0, -1.0], [2.0, 2.5]])
    data = Dataset([0, 0, 0], X)
    s = Section(X.mean(axis=0, keepdims=True))
    grad = grad_section(data, s, EYE2, SemanticGraph.empty(1), Hyperparams(0.0, 0.0, 1.0))
    np.testing.assert_allclose(grad, 0.0, atol=1e-15)


def test_coincident_prototypes_get_no_repulsion_push():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(6, 3))
    data = Dataset([0, 0, 0, 1, 1, 1], X)
    P = np.array([[0.1, 0.2, 0.3], [0.1, 0.2, 0.3]])
    graph = SemanticGraph(((0, 1, 1.0), (1, 0, 1.0)), 2)
    g = Metric(np.exp(rng.normal(size=3)))
    with_rep = grad_section(data, Section(P), g, graph, Hyperparams(0.3, 0.7, 1.0))
    without = grad_section(data, Section(P), g, graph, Hyperparams(0.3, 0.0, 1.0))
    np.testing.assert_array_equal(with_rep, without)
    # the remaining (smooth) terms agree with finite differences
    fd = fd_grad_section(data, P, np.log(g.weights), graph, Hyperparams(0.3, 0.0, 1.0))
    assert rel_err(without, fd) < 1e-5
    assert np.all(np.isfinite(grad_theta(data, Section(P), g, graph, Hyperparams(0.3, 0.7, 1.0))))


def test_theta_gradient_zero_when_energy_vanishes():
    P = np.array([[0.0, 0.0], [4.0, 4.0]])
    data = Dataset([0, 1, 1], np.vstack([P, P[1]]))
    grad = grad_theta(data, Section(P), Metric(np.ones(2)), SemanticGraph.empty(2), Hyperparams(0.0, 1.0, 1.0))
    np.testing.assert_array_equal(grad, 0.0)


def test_theta_gradient_sums_to_attachment():
    # shifting every theta by eps scales attachment by e^eps
    rng = np.random.default_rng(21)
    data, s, params, graph, _ = random_instance(rng)
    hp = Hyperparams(0.0, 0.0, 1.0)
    g = metric_from_theta(params)
    assert np.sum(grad_theta(data, s, g, graph, hp)) == pytest.approx(attachment_energy(data, s, g), rel=1e-12)


# -- invariants ---------------------------------------------------------------

@pytest.mark.parametrize("seed", range(20))
def test_energy_terms_nonnegative(seed):
    data, s, params, graph, hp = random_instance(np.random.default_rng(seed))
    terms = energy_terms(data, s, metric_from_theta(params), graph, hp)
    assert min(terms) >= 0.0


@pytest.mark.parametrize("seed", range(10))
def test_translation_invariance(seed):
    rng = np.random.default_rng(seed)
    data, s, params, graph, hp = random_instance(rng)
    shift = rng.normal(size=data.dim) * 3
    g = metric_from_theta(params)
    moved = Dataset(data.labels, data.features + shift)
    before = energy_terms(data, s, g, graph, hp)
    after = energy_terms(moved, Section(s.prototypes + shift), g, graph, hp)
    np.testing.assert_allclose(after, before, rtol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    data, s, params, graph, hp = random_instance(rng)
    n = s.n_classes
    perm = rng.permutation(n)  # old id -> new id
    inv = np.argsort(perm)
    moved = Dataset(perm[data.labels], data.features)
    P = s.prototypes[inv]
    g2 = SemanticGraph(tuple((int(perm[i]), int(perm[j]), w) for i, j, w in graph.edges), n)
    g = metric_from_theta(params)
    assert total_energy(moved, Section(P), g, g2, hp) == pytest.approx(total_energy(data, s, g, graph, hp), rel=1e-12)
