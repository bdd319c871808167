"""File formats: manifests, feature/embedding/adjacency CSVs, model files.

Feature CSV
    ``sample_id,class_id,v_0,...,v_{d-1}``; the ``class_id`` column holds
    the class *name* (ids are assigned by sorted name on load) and may be
    empty for unlabeled prediction inputs.
WAV manifest
    ``sample_id,class_name,path`` with paths relative to the manifest.
Embeddings
    ``class_name,e_0,...,e_{m-1}`` (header optional).
Adjacency
    ``src_class,dst_class,weight``; weights are renormalized per source.
Model
    JSON text tagged with ``format`` and ``version``.  Floats are written
    with Python's shortest round-trip repr, so load(save(m)) is exact.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .energy import Dataset, EnergyTerms, Hyperparams, Section
from .errors import DataError, LoadError, ShapeError, VersionError
from .metric import MetricParams
from .semgraph import ClassRegistry, SemanticGraph, graph_from_edges
from .trainer import Model
from .wavelet import WaveletConfig, extract_features, read_wav

MODEL_FORMAT = "protometric-model"
MODEL_VERSION = 1


def _read_rows(path):
    try:
        with open(path, newline="") as fh:
            return [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc


def _float(text, where):
    try:
        value = float(text)
    except ValueError:
        raise LoadError(f"{where}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise LoadError(f"{where}: non-finite value {text!r}")
    return value


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


# -- features -----------------------------------------------------------------

def read_features(path):
    """Return ``(sample_ids, class_names, X)`` from a feature CSV."""
    rows = _read_rows(path)
    if not rows:
        raise LoadError(f"{path}: empty feature file")
    header, body = rows[0], rows[1:]
    if len(header) < 3 or header[0] != "sample_id":
        raise LoadError(f"{path}: expected header 'sample_id,class_id,v_0,...'")
    d = len(header) - 2
    ids, names, X = [], [], []
    for r, row in enumerate(body, start=1):
        if len(row) != d + 2:
            raise ShapeError(
                f"{path}: row {r} has {len(row) - 2} feature values, expected {d}"
            )
        ids.append(row[0])
        names.append(row[1].strip())
        X.append([_float(x, f"{path}: row {r}") for x in row[2:]])
    if not X:
        raise LoadError(f"{path}: no feature rows")
    return ids, names, np.array(X, dtype=np.float64)


def write_features(path, sample_ids, class_names, X):
    X = np.asarray(X, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "class_id"] + [f"v_{i}" for i in range(X.shape[1])])
        for sid, name, row in zip(sample_ids, class_names, X):
            w.writerow([sid, name] + [repr(float(x)) for x in row])


def dataset_from_features(sample_ids, class_names, X, registry=None):
    if any(not n for n in class_names):
        missing = [i + 1 for i, n in enumerate(class_names) if not n]
        raise DataError(f"unlabeled rows in training data: row {missing[0]}")
    registry = registry or ClassRegistry.from_names(class_names)
    labels = [registry.id_of(n) for n in class_names]
    return registry, Dataset(np.array(labels), X)


def extract_manifest(manifest, config):
    """Decode every WAV listed in `manifest`; returns ``(ids, names, X)``."""
    manifest = Path(manifest)
    rows = _read_rows(manifest)
    if not rows or [c.strip() for c in rows[0][:3]] != ["sample_id", "class_name", "path"]:
        raise LoadError(f"{manifest}: expected header 'sample_id,class_name,path'")
    ids, names, X = [], [], []
    for r, row in enumerate(rows[1:], start=1):
        if len(row) < 3:
            raise LoadError(f"{manifest}: row {r} needs sample_id, class_name and path")
        wav = Path(row[2])
        if not wav.is_absolute():
            wav = manifest.parent / wav
        try:
            vec = extract_features(read_wav(wav), config)
        except DataError as exc:
            raise DataError(f"{manifest}: row {r}: {exc}") from exc
        ids.append(row[0])
        names.append(row[1].strip())
        X.append(vec)
    if not X:
        raise LoadError(f"{manifest}: no entries")
    return ids, names, np.vstack(X)


def load_dataset(manifest, config=None):
    """Build ``(registry, dataset, sample_ids)`` from a manifest.

    A manifest with a ``path`` column is treated as a WAV listing and
    featurized with `config`; otherwise it must be a feature CSV.
    """
    rows = _read_rows(manifest)
    if rows and len(rows[0]) >= 3 and rows[0][2].strip() == "path":
        ids, names, X = extract_manifest(manifest, config or WaveletConfig())
    else:
        ids, names, X = read_features(manifest)
    registry, data = dataset_from_features(ids, names, X)
    return registry, data, ids


# -- embeddings and adjacency -------------------------------------------------

def read_embeddings(path):
    """``{class_name: vector}`` from an embedding CSV."""
    rows = _read_rows(path)
    if rows and not all(_is_number(c) for c in rows[0][1:]):
        rows = rows[1:]
    table = {}
    for r, row in enumerate(rows, start=1):
        if len(row) < 2:
            raise LoadError(f"{path}: row {r} has no embedding values")
        name = row[0].strip()
        if name in table:
            raise LoadError(f"{path}: duplicate class {name!r} at row {r}")
        table[name] = np.array([_float(x, f"{path}: row {r}") for x in row[1:]])
    if len({v.size for v in table.values()}) > 1:
        raise ShapeError(f"{path}: embeddings have differing dimensions")
    if not table:
        raise LoadError(f"{path}: no embeddings")
    return table


def write_adjacency(path, graph, registry):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src_class", "dst_class", "weight"])
        for i, j, wt in graph.edges:
            w.writerow([registry.names[i], registry.names[j], repr(wt)])


def read_adjacency(path, registry):
    rows = _read_rows(path)
    if rows and [c.strip() for c in rows[0]] == ["src_class", "dst_class", "weight"]:
        rows = rows[1:]
    edges = []
    for r, row in enumerate(rows, start=1):
        if len(row) != 3:
            raise LoadError(f"{path}: row {r} must be src_class,dst_class,weight")
        edges.append((row[0].strip(), row[1].strip(), _float(row[2], f"{path}: row {r}")))
    return graph_from_edges(registry, edges)


# -- training / prediction outputs --------------------------------------------

def write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "E_total", "E_att", "E_ten", "E_rep"])
        for t, e in enumerate(trace):
            w.writerow([t] + [repr(float(x)) for x in e])


def read_trace(path):
    rows = _read_rows(path)[1:]
    return [EnergyTerms(*(float(x) for x in row[1:])) for row in rows]


def write_predictions(dest, rows):
    """Write prediction rows to a path or an open text stream."""
    if hasattr(dest, "write"):
        _prediction_csv(dest, rows)
        return
    with open(dest, "w", newline="") as fh:
        _prediction_csv(fh, rows)


def _prediction_csv(fh, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["sample_id", "predicted_class", "distance", "second_class", "margin_gap"])
    for sid, best, dist, second, gap in rows:
        w.writerow([sid, best, repr(float(dist)), second, repr(float(gap))])


# -- model persistence --------------------------------------------------------

def model_to_dict(model):
    cfg = model.wavelet_config
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "classes": list(model.registry.names),
        "theta": [float(x) for x in model.metric_params.theta],
        "weights": [float(x) for x in model.weights],
        "prototypes": [[float(x) for x in row] for row in model.section.prototypes],
        "hyperparams": {
            "lambda1": float(model.hyperparams.lambda1),
            "lambda2": float(model.hyperparams.lambda2),
            "margin": float(model.hyperparams.margin),
        },
        "wavelet": None if cfg is None else {
            "family": cfg.family,
            "levels": cfg.levels,
            "coeffs_per_band": cfg.coeffs_per_band,
            "boundary": cfg.boundary,
            "normalize": cfg.normalize,
        },
        "graph": [[i, j, w] for i, j, w in model.graph.edges],
        "energy_trace": [[float(x) for x in e] for e in model.energy_trace],
        "stop_reason": model.stop_reason,
    }


def model_from_dict(doc):
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise LoadError("not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise VersionError(
            f"unsupported model version {doc.get('version')!r} (expected {MODEL_VERSION})"
        )
    try:
        registry = ClassRegistry(tuple(doc["classes"]))
        theta = np.array(doc["theta"], dtype=np.float64)
        P = np.array(doc["prototypes"], dtype=np.float64)
        if P.shape != (len(registry), theta.size):
            raise LoadError(
                f"prototype array shape {P.shape} inconsistent with "
                f"{len(registry)} classes and theta of size {theta.size}"
            )
        wav = doc.get("wavelet")
        return Model(
            section=Section(P),
            metric_params=MetricParams(theta),
            registry=registry,
            hyperparams=Hyperparams(**doc["hyperparams"]),
            graph=SemanticGraph(tuple(tuple(e) for e in doc["graph"]), len(registry)),
            wavelet_config=None if wav is None else WaveletConfig(**wav),
            energy_trace=[EnergyTerms(*e) for e in doc["energy_trace"]],
            stop_reason=doc.get("stop_reason", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, LoadError):
            raise
        raise LoadError(f"corrupted model file: {exc}") from exc


def save_model(model, path):
    text = json.dumps(model_to_dict(model), indent=1, allow_nan=False)
    Path(path).write_text(text + "\n")


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise LoadError(f"cannot read model {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"corrupted model file {path}: {exc}") from exc
    return model_from_dict(doc)
