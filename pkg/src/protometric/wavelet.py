"""Multi-level orthogonal DWT and fixed-size top-k feature vectors.

The decomposition recursively splits the low-pass branch, producing an
approximation band ``A_L`` and detail bands ``D_L, ..., D_1``.  Feature
vectors keep the ``k`` largest-magnitude (signed) coefficients of every band
and concatenate the blocks as ``[A_L, D_L, ..., D_1]``.

Filters are stored as orthonormal reconstruction low-pass taps; the matching
high-pass is the quadrature mirror ``g[j] = (-1)**j * h[F-1-j]``.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, DepthError, ShapeError

# Orthonormal low-pass taps (sum = sqrt(2), sum of squares = 1).
_LOWPASS = {
    "haar": (
        0.70710678118654752440,
        0.70710678118654752440,
    ),
    "db2": (
        0.48296291314453414337,
        0.83651630373780790558,
        0.22414386804201338103,
        -0.12940952255126038117,
    ),
    "db4": (
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.027983769416859854211,
        -0.18703481171909308408,
        0.030841381835560763627,
        0.032883011666885199735,
        -0.010597401785069032105,
    ),
}
_ALIASES = {"db1": "haar"}
_VANISHING_MOMENTS = {"haar": 1, "db2": 2, "db4": 4}

BOUNDARY_MODES = ("periodic", "symmetric", "zero")


def available_families():
    return sorted(set(_LOWPASS) | set(_ALIASES))


def filter_bank(family):
    """Return ``(lowpass, highpass)`` orthonormal taps for `family`."""
    name = _ALIASES.get(str(family).lower(), str(family).lower())
    if name not in _LOWPASS:
        raise ConfigError(
            f"unknown wavelet family {family!r}; "
            f"known: {', '.join(available_families())}"
        )
    h = np.array(_LOWPASS[name], dtype=np.float64)
    g = h[::-1] * (-1.0) ** np.arange(h.size)
    return h, g


def vanishing_moments(family):
    name = _ALIASES.get(str(family).lower(), str(family).lower())
    filter_bank(name)
    return _VANISHING_MOMENTS[name]


@dataclass(frozen=True)
class WaveletConfig:
    """Decomposition and feature settings shared by every processed signal.

    Attributes
    ----------
    family : str
        Filter family (``"haar"``/``"db1"``, ``"db2"``, ``"db4"``).
    levels : int
        Decomposition depth ``L``.
    coeffs_per_band : int
        Number ``k`` of coefficients kept per band.
    boundary : str
        Signal extension: ``"periodic"`` (exact Parseval), ``"symmetric"``
        or ``"zero"``.
    normalize : bool
        Scale signals to unit peak amplitude before decomposing
        (feature extraction only).
    """

    family: str = "db4"
    levels: int = 5
    coeffs_per_band: int = 10
    boundary: str = "periodic"
    normalize: bool = True

    def __post_init__(self):
        filter_bank(self.family)
        if int(self.levels) != self.levels or self.levels < 1:
            raise ConfigError(f"levels must be a positive integer, got {self.levels!r}")
        if int(self.coeffs_per_band) != self.coeffs_per_band or self.coeffs_per_band < 1:
            raise ConfigError(
                f"coeffs_per_band must be a positive integer, got {self.coeffs_per_band!r}"
            )
        if self.boundary not in BOUNDARY_MODES:
            raise ConfigError(
                f"boundary must be one of {BOUNDARY_MODES}, got {self.boundary!r}"
            )

    @property
    def dim(self):
        """Feature dimension ``(L + 1) * k``."""
        return (self.levels + 1) * self.coeffs_per_band

    def band_names(self):
        """Band labels in feature-block order, e.g. ``['A5', 'D5', ..., 'D1']``."""
        L = self.levels
        return [f"A{L}"] + [f"D{lvl}" for lvl in range(L, 0, -1)]

    def dimension_labels(self):
        """One label per feature dimension: ``'<band>#<rank>'`` (rank from 1)."""
        k = self.coeffs_per_band
        return [f"{band}#{r}" for band in self.band_names() for r in range(1, k + 1)]


@dataclass(frozen=True)
class Signal:
    samples: np.ndarray
    sample_rate: int = 1

    def __post_init__(self):
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise DataError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")


@dataclass
class BandSet:
    """Leaves of the decomposition tree.

    ``details`` is ordered coarse to fine: ``[D_L, ..., D_1]``.
    ``lengths[l]`` is the length of the input to level ``l + 1`` (so
    ``lengths[0]`` is the original signal length); reconstruction uses it to
    trim boundary padding.
    """

    approx: np.ndarray
    details: list
    lengths: tuple = field(default=())

    @property
    def levels(self):
        return len(self.details)

    def bands(self):
        """All bands in feature-block order ``[A_L, D_L, ..., D_1]``."""
        return [self.approx] + list(self.details)

    def energy(self):
        return float(sum(np.dot(b, b) for b in self.bands()))


def _as_samples(signal):
    x = signal.samples if isinstance(signal, Signal) else signal
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"signal must be one-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataError("signal contains non-finite samples")
    return x


def _analysis_index(n_out, n_taps, offset, modulus=None):
    idx = 2 * np.arange(n_out)[:, None] + np.arange(n_taps)[None, :] + offset
    if modulus is not None:
        idx %= modulus
    return idx


def _extend(x, pad, mode):
    if mode == "symmetric":
        return np.pad(x, pad, mode="symmetric")
    return np.pad(x, pad, mode="constant")


def _dwt_step(x, h, g, mode):
    F = h.size
    if mode == "periodic":
        if x.size % 2:
            x = np.append(x, x[-1])
        idx = _analysis_index(x.size // 2, F, 0, modulus=x.size)
    else:
        x = _extend(x, F - 1, mode)
        n_out = (x.size - F + 1) // 2
        idx = _analysis_index(n_out, F, 1)
    windows = x[idx]
    return windows @ h, windows @ g


def _idwt_step(a, d, h, g, n, mode):
    F = h.size
    if mode == "periodic":
        m = n + (n % 2)
        if a.size != m // 2 or d.size != m // 2:
            raise ShapeError(
                f"periodic band length {a.size}/{d.size} does not match signal length {n}"
            )
        idx = _analysis_index(m // 2, F, 0, modulus=m)
        out = np.zeros(m)
        lo = 0
    else:
        n_out = (n + F - 1) // 2
        if a.size != n_out or d.size != n_out:
            raise ShapeError(
                f"{mode} band length {a.size}/{d.size} does not match signal length {n}"
            )
        idx = _analysis_index(n_out, F, 1)
        out = np.zeros(n + 2 * (F - 1))
        lo = F - 1
    np.add.at(out, idx, a[:, None] * h[None, :] + d[:, None] * g[None, :])
    return out[lo : lo + n]


def dwt_decompose(signal, config):
    """Decompose `signal` into ``L`` detail bands and one approximation band.

    With periodic extension the transform is orthogonal, so the signal
    energy equals the total band energy.

    Raises
    ------
    DepthError
        If the signal is shorter than ``2**L``.
    DataError
        If any sample is non-finite.
    """
    x = _as_samples(signal)
    L = config.levels
    if x.size < 2**L:
        raise DepthError(
            f"signal of length {x.size} is too short for {L} levels (need >= {2**L})"
        )
    h, g = filter_bank(config.family)
    details = []
    lengths = []
    a = x
    for _ in range(L):
        lengths.append(a.size)
        a, d = _dwt_step(a, h, g, config.boundary)
        details.append(d)
    return BandSet(approx=a, details=details[::-1], lengths=tuple(lengths))


def reconstruct(bands, config):
    """Invert :func:`dwt_decompose` (exact for every boundary mode)."""
    if bands.levels != config.levels:
        raise ShapeError(
            f"band set has {bands.levels} detail bands, config expects {config.levels}"
        )
    lengths = bands.lengths
    if len(lengths) != config.levels:
        raise ShapeError("band set does not record per-level input lengths")
    h, g = filter_bank(config.family)
    a = np.asarray(bands.approx, dtype=np.float64)
    # details are stored coarse-to-fine; lengths fine-to-coarse
    for d, n in zip(bands.details, lengths[::-1]):
        a = _idwt_step(a, np.asarray(d, dtype=np.float64), h, g, n, config.boundary)
    return a


def top_k_block(band, k):
    """Signed values of the `k` largest-magnitude entries, zero-padded.

    Ordered by descending magnitude; ties keep the lower index first.
    """
    band = np.asarray(band, dtype=np.float64)
    order = np.argsort(-np.abs(band), kind="stable")[:k]
    block = np.zeros(k)
    block[: order.size] = band[order]
    return block


def build_feature_vector(bands, k):
    """Concatenate per-band top-`k` blocks in order ``[A_L, D_L, ..., D_1]``."""
    if int(k) != k or k <= 0:
        raise ConfigError(f"k must be a positive integer, got {k!r}")
    band_list = bands.bands() if isinstance(bands, BandSet) else list(bands)
    if not band_list:
        raise DataError("no bands to build a feature vector from")
    return np.concatenate([top_k_block(b, int(k)) for b in band_list])


def extract_features(signal, config):
    """Map a time-domain signal to its ``(L + 1) * k`` feature vector."""
    x = _as_samples(signal)
    if config.normalize:
        peak = np.max(np.abs(x)) if x.size else 0.0
        if peak > 0:
            x = x / peak
    return build_feature_vector(dwt_decompose(x, config), config.coeffs_per_band)


def read_wav(path):
    """Read a PCM WAV file as a mono :class:`Signal` with samples in [-1, 1].

    Integer formats are scaled by their full-scale value; multi-channel
    audio is averaged down to one channel.
    """
    from scipy.io import wavfile

    try:
        rate, data = wavfile.read(str(Path(path)))
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read WAV file {path}: {exc}") from exc
    if data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    elif np.issubdtype(data.dtype, np.integer):
        samples = data.astype(np.float64) / float(-np.iinfo(data.dtype).min)
    else:
        samples = data.astype(np.float64)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return Signal(samples=samples, sample_rate=int(rate))
