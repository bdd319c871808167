"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ProtometricError`.  The CLI maps the three families below onto its
exit codes (config -> 1, data -> 2, numerical -> 3).
"""


class ProtometricError(Exception):
    """Base class for all package errors."""


class ConfigError(ProtometricError, ValueError):
    """Invalid configuration or hyperparameter."""


class DepthError(ConfigError):
    """Signal too short for the requested number of decomposition levels."""


class DataError(ProtometricError, ValueError):
    """Invalid input data (non-finite values, empty sets, unknown labels)."""


class ShapeError(DataError):
    """Dimension mismatch between arrays that must agree."""


class ParameterError(DataError):
    """Non-finite metric parameters."""


class GraphError(DataError):
    """Semantic graph references unknown classes or has invalid weights."""


class TrainingDataError(DataError):
    """Dataset unusable for training (e.g. a class without samples)."""


class LoadError(DataError):
    """File could not be read or parsed."""


class VersionError(LoadError):
    """Model file carries an unsupported format version."""


class NumericalError(ProtometricError, ArithmeticError):
    """Non-finite energy encountered during optimization.

    ``trace`` holds the energy records collected before the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []
