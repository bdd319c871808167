"""
Metric and energy
=================

Distances use a diagonal metric with weights a = exp(theta).  The training
energy has three parts: samples pulled toward their prototype, related
prototypes pulled together, and every prototype pair pushed apart up to a
margin.
"""

import numpy as np

from protometric import (
    ClassRegistry,
    Dataset,
    Hyperparams,
    MetricParams,
    Section,
    build_adjacency,
    distance,
    energy_terms,
    grad_theta,
    metric_from_theta,
)

g = metric_from_theta(MetricParams(np.log([4.0, 1.0])))
print("d((0,0),(1,1)) with a=(4,1):", distance([0, 0], [1, 1], g))

###############################################################################
# Three classes in the plane; only the first coordinate separates them.

rng = np.random.default_rng(1)
labels = np.repeat([0, 1, 2], 20)
X = np.column_stack([labels * 1.0, rng.normal(size=labels.size)])
X[:, 0] += 0.1 * rng.normal(size=labels.size)
data = Dataset(labels, X)

reg = ClassRegistry(("a", "b", "c"))
graph = build_adjacency(reg, {"a": [1, 0], "b": [1, 1], "c": [0, 1]}, k=1)
s = Section(np.array([X[labels == c].mean(axis=0) for c in range(3)]))
hp = Hyperparams(lambda1=0.1, lambda2=0.5, margin=1.5)

theta = np.zeros(2)
terms = energy_terms(data, s, metric_from_theta(theta), graph, hp)
print("energy at theta=0:", terms)

###############################################################################
# The theta-gradient is negative for the informative coordinate (raising its
# weight helps repulsion) and positive for the noisy one.

print("grad_theta:", grad_theta(data, s, metric_from_theta(theta), graph, hp))
