"""Class registry and the top-K semantic neighbor graph over classes."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, GraphError, ShapeError

logger = logging.getLogger(__name__)

SIMILARITY_FLOOR = 1e-6


@dataclass(frozen=True)
class ClassRegistry:
    """Ordered class names; a class id is its position in ``names``."""

    names: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        if len(set(self.names)) != len(self.names):
            raise DataError("class names must be unique")

    @classmethod
    def from_names(cls, names):
        """Registry with ids assigned in sorted-name order."""
        return cls(tuple(sorted(set(names))))

    def __len__(self):
        return len(self.names)

    def id_of(self, name):
        try:
            return self.names.index(str(name))
        except ValueError:
            raise DataError(f"unknown class {name!r}") from None

    def name_of(self, class_id):
        return self.names[class_id]


@dataclass(frozen=True)
class SemanticGraph:
    """Directed weighted edges ``(src, dst, weight)`` between class ids."""

    edges: tuple
    n_classes: int

    def __post_init__(self):
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        object.__setattr__(self, "edges", edges)
        for i, j, w in edges:
            if not (0 <= i < self.n_classes and 0 <= j < self.n_classes):
                raise GraphError(f"edge ({i}, {j}) references an unknown class")
            if i == j:
                raise GraphError(f"self-loop on class {i}")
            if not np.isfinite(w) or w < 0:
                raise GraphError(f"edge ({i}, {j}) has invalid weight {w}")

    @classmethod
    def empty(cls, n_classes):
        return cls((), n_classes)

    def arrays(self):
        """``(src, dst, weight)`` as numpy arrays in edge order."""
        if not self.edges:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        src, dst, w = zip(*self.edges)
        return np.array(src), np.array(dst), np.array(w, dtype=np.float64)

    def neighbors(self, i):
        return [(j, w) for s, j, w in self.edges if s == i]

    def adjacency_matrix(self):
        W = np.zeros((self.n_classes, self.n_classes))
        for i, j, w in self.edges:
            W[i, j] += w
        return W


def cosine_similarity(e1, e2):
    e1 = np.asarray(e1, dtype=np.float64)
    e2 = np.asarray(e2, dtype=np.float64)
    if e1.shape != e2.shape:
        raise ShapeError(f"embedding shapes differ: {e1.shape} vs {e2.shape}")
    n1 = np.linalg.norm(e1)
    n2 = np.linalg.norm(e2)
    if n1 == 0 or n2 == 0:
        raise DataError("cosine similarity is undefined for a zero-norm vector")
    return float(np.dot(e1, e2) / (n1 * n2))


def similarity_matrix(embeddings):
    E = np.asarray(embeddings, dtype=np.float64)
    norms = np.linalg.norm(E, axis=1)
    if np.any(norms == 0):
        raise DataError("embedding table contains a zero-norm vector")
    U = E / norms[:, None]
    return np.clip(U @ U.T, -1.0, 1.0)


def _embedding_matrix(registry, table):
    try:
        rows = [np.asarray(table[name], dtype=np.float64) for name in registry.names]
    except KeyError as exc:
        raise DataError(f"no embedding for class {exc.args[0]!r}") from None
    if len({r.shape for r in rows}) != 1:
        raise ShapeError("embeddings do not share one dimension")
    return np.vstack(rows)


def build_adjacency(registry, table, k=3):
    """Connect every class to its `k` most similar other classes.

    `table` maps class name to embedding vector.  Ties in similarity go to the
    lower class id.  Similarities below ``1e-6`` are clipped to that floor so
    every edge weight stays positive; weights are normalized per source.
    """
    n = len(registry)
    if n < 2:
        raise ConfigError("a semantic graph needs at least two classes")
    if int(k) != k or k < 1 or k >= n:
        raise ConfigError(f"K must satisfy 1 <= K < N={n}, got {k!r}")
    S = similarity_matrix(_embedding_matrix(registry, table))
    edges = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        # lexsort: last key is primary
        order = np.lexsort((others, -S[i, others]))
        chosen = [others[o] for o in order[: int(k)]]
        sims = S[i, chosen]
        if np.any(sims < SIMILARITY_FLOOR):
            logger.warning(
                "class %r: clipping %d neighbor similarities to %g",
                registry.names[i], int(np.sum(sims < SIMILARITY_FLOOR)), SIMILARITY_FLOOR,
            )
            sims = np.maximum(sims, SIMILARITY_FLOOR)
        weights = sims / sims.sum()
        edges.extend((i, j, w) for j, w in zip(chosen, weights))
    return SemanticGraph(tuple(edges), n)


def graph_from_edges(registry, rows):
    """Graph from ``(src_name, dst_name, weight)`` rows, renormalized per source.

    Rows that already sum to 1 (within 1e-12) are kept verbatim so a
    written graph reads back bit-for-bit.
    """
    raw = {}
    for src, dst, w in rows:
        i, j = registry.id_of(src), registry.id_of(dst)
        w = float(w)
        if not np.isfinite(w) or w <= 0:
            raise GraphError(f"edge {src!r} -> {dst!r} has non-positive weight {w}")
        raw.setdefault(i, []).append((j, w))
    edges = []
    for i in sorted(raw):
        total = math.fsum(w for _, w in raw[i])
        if abs(total - 1.0) <= 1e-12:
            total = 1.0
        edges.extend((i, j, w / total) for j, w in raw[i])
    return SemanticGraph(tuple(edges), len(registry))
