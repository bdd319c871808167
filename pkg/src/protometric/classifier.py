"""Nearest-prototype inference and model reports."""

import numpy as np

from .errors import ConfigError, ShapeError
from .metric import distance_squared, pairwise_distance_squared


def _queries(v, model):
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != model.dim:
        raise ShapeError(f"feature dimension {v.shape[-1]} does not match model dimension {model.dim}")
    return v


def distances_squared(v, model):
    """Squared metric distance from each query row to every prototype."""
    v = _queries(v, model)
    return distance_squared(v[..., None, :], model.section.prototypes, model.metric)


def predict(v, model):
    """Class id of the nearest prototype; ties go to the lowest id.

    Accepts a single vector or a 2-D batch (returns an int array).
    """
    d2 = distances_squared(v, model)
    # argmin returns the first minimum
    out = np.argmin(d2, axis=-1)
    return int(out) if np.ndim(out) == 0 else out


def predict_ranked(v, model, top=None):
    """``[(class_id, distance), ...]`` for the `top` nearest prototypes."""
    n = model.n_classes
    top = n if top is None else int(top)
    if not 1 <= top <= n:
        raise ConfigError(f"top must lie in [1, {n}], got {top}")
    d2 = distances_squared(v, model)
    if d2.ndim != 1:
        raise ShapeError("predict_ranked takes a single feature vector")
    order = np.argsort(d2, kind="stable")[:top]
    return [(int(c), float(np.sqrt(d2[c]))) for c in order]


def prediction_rows(features, model, sample_ids=None):
    """Rows ``(sample_id, predicted_name, distance, second_name, margin_gap)``.

    ``margin_gap`` is the distance to the runner-up prototype minus the
    distance to the winner; with a single class the runner-up fields are
    empty.
    """
    X = np.atleast_2d(_queries(features, model))
    if sample_ids is None:
        sample_ids = [str(i) for i in range(X.shape[0])]
    d = np.sqrt(distances_squared(X, model))
    order = np.argsort(d, axis=1, kind="stable")
    names = model.registry.names
    rows = []
    for sid, dist, rank in zip(sample_ids, d, order):
        best = rank[0]
        if rank.size > 1:
            second = rank[1]
            rows.append((sid, names[best], dist[best], names[second], dist[second] - dist[best]))
        else:
            rows.append((sid, names[best], dist[best], "", 0.0))
    return rows


def dimension_labels(model):
    if model.wavelet_config is not None and model.wavelet_config.dim == model.dim:
        return model.wavelet_config.dimension_labels()
    return [f"v{i}" for i in range(model.dim)]


def explain(model):
    """Interpretability report for a trained model.

    Returns a dict with

    * ``weights``: ``[(dim, label, weight), ...]`` sorted by decreasing
      weight (ties by dimension);
    * ``band_importance``: mean weight per band, in feature-block order;
    * ``prototype_distances``: ``N x N`` distance matrix under the learned
      metric;
    * ``classes``: class names in id order.
    """
    a = model.weights
    labels = dimension_labels(model)
    order = np.lexsort((np.arange(a.size), -a))
    weights = [(int(i), labels[i], float(a[i])) for i in order]

    bands = []
    cfg = model.wavelet_config
    if cfg is not None and cfg.dim == model.dim:
        k = cfg.coeffs_per_band
        for b, name in enumerate(cfg.band_names()):
            bands.append((name, float(np.mean(a[b * k : (b + 1) * k]))))

    D = np.sqrt(pairwise_distance_squared(model.section.prototypes, model.metric))
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return {
        "classes": list(model.registry.names),
        "weights": weights,
        "band_importance": bands,
        "prototype_distances": D,
    }


def format_report(report, top=None):
    lines = ["# metric weights (dim, label, weight)"]
    rows = report["weights"] if top is None else report["weights"][:top]
    lines += [f"{i},{label},{w!r}" for i, label, w in rows]
    if report["band_importance"]:
        lines.append("# mean weight per band")
        lines += [f"{name},{w!r}" for name, w in report["band_importance"]]
    lines.append("# prototype distances")
    names = report["classes"]
    lines.append("," + ",".join(names))
    for name, row in zip(names, report["prototype_distances"]):
        lines.append(name + "," + ",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"
