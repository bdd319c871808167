import sys

import numpy as np
import pytest

from protometric.energy import Dataset, Hyperparams, Section
from protometric.metric import MetricParams
from protometric.semgraph import SemanticGraph


def random_graph(rng, n):
    """Random directed graph with per-source normalized weights."""
    edges = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        k = int(rng.integers(1, len(others) + 1))
        chosen = rng.choice(others, size=k, replace=False)
        w = rng.uniform(0.1, 1.0, size=k)
        edges.extend((i, int(j), float(x)) for j, x in zip(chosen, w / w.sum()))
    return SemanticGraph(tuple(edges), n)


def random_instance(rng, n=None, d=None, m=None):
    """Random (data, section, params, graph, hp) with every class populated."""
    n = n or int(rng.integers(2, 6))
    d = d or int(rng.integers(1, 9))
    m = max(m or int(rng.integers(n, 21)), n)
    labels = np.concatenate([np.arange(n), rng.integers(0, n, size=m - n)])
    centers = rng.normal(scale=0.6, size=(n, d))
    X = centers[labels] + rng.normal(scale=0.4, size=(m, d))
    P = centers + rng.normal(scale=0.2, size=(n, d))
    theta = rng.normal(scale=0.5, size=d)
    hp = Hyperparams(
        lambda1=float(rng.uniform(0, 1)),
        lambda2=float(rng.uniform(0, 1)),
        margin=float(rng.uniform(0.5, 2.0)),
    )
    graph = random_graph(rng, n)
    return Dataset(labels, X), Section(P), MetricParams(theta), graph, hp


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
