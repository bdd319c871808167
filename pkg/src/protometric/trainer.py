"""Alternating minimization of the prototype energy.

Each outer iteration runs a block of gradient steps on the prototypes with
the metric fixed, then a block on the metric log-weights with the
prototypes fixed.  Every step is guarded by a backtracking line search that
only accepts strict decreases, so the recorded energy trace never goes up.
"""

from dataclasses import dataclass, field

import numpy as np

from .energy import (
    Dataset,
    Hyperparams,
    Section,
    energy_terms,
    grad_section,
    grad_theta,
)
from .errors import ConfigError, NumericalError, TrainingDataError
from .metric import MetricParams, clamp_theta, metric_from_theta
from .semgraph import ClassRegistry, SemanticGraph
from .wavelet import WaveletConfig


@dataclass(frozen=True)
class TrainConfig:
    t_max: int = 100
    epsilon: float = 1e-4
    inner_steps_section: int = 10
    inner_steps_theta: int = 10
    lr0_section: float = 0.1
    lr0_theta: float = 0.1
    shrink: float = 0.5
    max_halvings: int = 30

    def __post_init__(self):
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise ConfigError(f"t_max must be an integer >= 1, got {self.t_max!r}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon!r}")
        for name in ("inner_steps_section", "inner_steps_theta", "max_halvings"):
            if int(getattr(self, name)) != getattr(self, name) or getattr(self, name) < 0:
                raise ConfigError(f"{name} must be a non-negative integer")
        if not (self.lr0_section > 0 and self.lr0_theta > 0):
            raise ConfigError("initial step sizes must be positive")
        if not 0 < self.shrink < 1:
            raise ConfigError(f"shrink factor must lie in (0, 1), got {self.shrink!r}")


@dataclass
class TrainState:
    data: Dataset
    section: Section
    params: MetricParams
    graph: SemanticGraph
    hp: Hyperparams
    last_section_steps: int = 0
    last_theta_steps: int = 0

    def terms(self):
        return energy_terms(
            self.data, self.section, metric_from_theta(self.params), self.graph, self.hp
        )


@dataclass
class Model:
    """Trained prototypes and metric plus everything needed to interpret them."""

    section: Section
    metric_params: MetricParams
    registry: ClassRegistry
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    graph: SemanticGraph = None
    wavelet_config: WaveletConfig = None
    energy_trace: list = field(default_factory=list)
    stop_reason: str = ""

    def __post_init__(self):
        if self.graph is None:
            self.graph = SemanticGraph.empty(len(self.registry))

    @property
    def metric(self):
        return metric_from_theta(self.metric_params)

    @property
    def weights(self):
        return self.metric.weights

    @property
    def dim(self):
        return self.section.dim

    @property
    def n_classes(self):
        return self.section.n_classes


def initialize(data, registry):
    """Class-mean prototypes and the Euclidean metric (``theta = 0``)."""
    n = len(registry)
    counts = np.bincount(data.labels, minlength=n)
    if counts.size > n:
        raise TrainingDataError("dataset has labels outside the class registry")
    missing = [registry.names[c] for c in range(n) if counts[c] == 0]
    if missing:
        raise TrainingDataError(f"classes without training samples: {', '.join(missing)}")
    sums = np.zeros((n, data.dim))
    np.add.at(sums, data.labels, data.features)
    return Section(sums / counts[:, None]), MetricParams.zeros(data.dim)


def _check_finite(value, what):
    if not np.isfinite(value):
        raise NumericalError(f"non-finite energy ({value}) during {what}")


def _descend(x0, energy_fn, grad_fn, steps, lr0, shrink, max_halvings, project, what):
    """Backtracking gradient descent; returns ``(x, n_accepted)``."""
    x = x0
    e = energy_fn(x)
    _check_finite(e, what)
    accepted = 0
    for _ in range(steps):
        grad = grad_fn(x)
        if not np.all(np.isfinite(grad)):
            raise NumericalError(f"non-finite gradient during {what}")
        if not np.any(grad):
            break
        lr = lr0
        for _ in range(max_halvings + 1):
            trial = project(x - lr * grad)
            e_trial = energy_fn(trial)
            if e_trial < e:
                break
            lr *= shrink
        else:
            break
        x, e = trial, e_trial
        accepted += 1
        lr0 = lr / shrink
    return x, accepted


def step_section(state, config):
    """Prototype block with the metric held fixed."""
    data, g, graph, hp = state.data, metric_from_theta(state.params), state.graph, state.hp

    def energy(P):
        return energy_terms(data, Section(P), g, graph, hp).total

    def grad(P):
        return grad_section(data, Section(P), g, graph, hp)

    P, n = _descend(
        state.section.prototypes, energy, grad,
        config.inner_steps_section, config.lr0_section,
        config.shrink, config.max_halvings, lambda P: P, "prototype update",
    )
    state.last_section_steps = n
    return Section(P)


def step_theta(state, config):
    """Metric block with the prototypes held fixed; theta stays in [-30, 30]."""
    data, s, graph, hp = state.data, state.section, state.graph, state.hp

    def energy(theta):
        return energy_terms(data, s, metric_from_theta(theta), graph, hp).total

    def grad(theta):
        return grad_theta(data, s, metric_from_theta(theta), graph, hp)

    theta, n = _descend(
        clamp_theta(state.params.theta), energy, grad,
        config.inner_steps_theta, config.lr0_theta,
        config.shrink, config.max_halvings, clamp_theta, "metric update",
    )
    state.last_theta_steps = n
    return MetricParams(theta)


def _log_terms(t, terms, stream):
    if stream is not None:
        print(f"{t},{terms.total!r},{terms.attachment!r},{terms.tension!r},{terms.repulsion!r}",
              file=stream)


def train(data, registry, graph=None, hp=None, tc=None, wavelet_config=None,
          progress=None):
    """Fit prototypes and metric by alternating descent.

    Stops when the outer-iteration energy change drops below
    ``tc.epsilon``, after ``tc.t_max`` iterations, or when neither block
    can make progress.  `progress` is an optional text stream receiving one
    ``t,E_total,E_att,E_ten,E_rep`` line per recorded energy.

    Raises
    ------
    NumericalError
        On a non-finite energy; ``exc.trace`` holds the energies so far.
    """
    hp = hp or Hyperparams()
    tc = tc or TrainConfig()
    graph = graph if graph is not None else SemanticGraph.empty(len(registry))
    if graph.n_classes != len(registry):
        raise ConfigError("semantic graph and class registry disagree on the class count")
    if wavelet_config is not None and wavelet_config.dim != data.dim:
        raise ConfigError(
            f"feature dimension {data.dim} does not match wavelet layout "
            f"(L+1)*k = {wavelet_config.dim}"
        )

    section, params = initialize(data, registry)
    state = TrainState(data, section, params, graph, hp)
    trace = []
    reason = "t_max"
    try:
        terms = state.terms()
        _check_finite(terms.total, "initialization")
        trace.append(terms)
        _log_terms(0, terms, progress)
        for t in range(1, tc.t_max + 1):
            state.section = step_section(state, tc)
            state.params = step_theta(state, tc)
            new = state.terms()
            _check_finite(new.total, f"iteration {t}")
            trace.append(new)
            _log_terms(t, new, progress)
            if abs(new.total - terms.total) < tc.epsilon:
                reason = "epsilon"
                break
            if state.last_section_steps == 0 and state.last_theta_steps == 0:
                reason = "stalled"
                break
            terms = new
    except NumericalError as exc:
        exc.trace = list(trace)
        raise

    return Model(
        section=state.section,
        metric_params=state.params,
        registry=registry,
        hyperparams=hp,
        graph=graph,
        wavelet_config=wavelet_config,
        energy_trace=trace,
        stop_reason=reason,
    )


def untrained_model(data, registry, graph=None, hp=None, wavelet_config=None):
    """Model at the initialization point (class means, Euclidean metric)."""
    section, params = initialize(data, registry)
    model = Model(section, params, registry, hp or Hyperparams(), graph, wavelet_config)
    state = TrainState(data, section, params, model.graph, model.hyperparams)
    model.energy_trace = [state.terms()]
    return model

