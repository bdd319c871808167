"""Prototype classification with a learned diagonal metric.

Signals are mapped to wavelet top-k feature vectors; one prototype per
class and a positive per-dimension metric are fitted jointly by alternating
descent on an attachment / semantic-tension / margin-repulsion energy; new
samples go to the nearest prototype under the learned metric.
"""

from .classifier import explain, predict, predict_ranked
from .energy import (
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
from .errors import (
    ConfigError,
    DataError,
    DepthError,
    LoadError,
    NumericalError,
    ProtometricError,
    ShapeError,
    VersionError,
)
from .io import load_dataset, load_model, save_model
from .metric import Metric, MetricParams, distance, distance_squared, metric_from_theta
from .semgraph import ClassRegistry, SemanticGraph, build_adjacency, cosine_similarity
from .trainer import Model, TrainConfig, initialize, step_section, step_theta, train
from .wavelet import (
    BandSet,
    Signal,
    WaveletConfig,
    build_feature_vector,
    dwt_decompose,
    extract_features,
    reconstruct,
)

__version__ = "0.1.0"
