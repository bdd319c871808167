"""Bundled planted-band dataset.

Three classes of white-noise signals:

* ``hiss``   -- plus an alternating (Nyquist-rate) tone, whose energy lands in
  the finest detail band ``D_1``;
* ``rumble`` -- plus a positive DC offset, whose energy lands in the
  approximation band ``A_L``;
* ``static`` -- noise only.

The intermediate detail bands carry the same noise statistics in every
class, so only the ``A_L`` and ``D_1`` feature blocks separate the classes.
"""

import csv
from pathlib import Path

import numpy as np

CLASS_NAMES = ("hiss", "rumble", "static")

# Tiny hand-made "name embeddings": hiss and static are both broadband.
EMBEDDINGS = {
    "hiss": (0.9, 0.1, 0.4),
    "rumble": (0.1, 0.95, 0.2),
    "static": (0.8, 0.2, 0.55),
}

SAMPLE_RATE = 8000


TONE_AMPLITUDE = 3.0
OFFSET_AMPLITUDE = 0.5


def planted_signals(n_per_class=60, length=1024, noise=1.0, seed=0):
    """Return ``(signals, class_names)`` with `n_per_class` signals per class.

    Each planted component is scaled by a per-signal factor drawn from
    U(0.6, 1.0).  The offset is smaller than the tone because the DC gain of
    the approximation branch grows by sqrt(2) per level.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    alternating = np.where(t % 2 == 0, 1.0, -1.0)
    signals, labels = [], []
    for name in CLASS_NAMES:
        for _ in range(n_per_class):
            x = noise * rng.standard_normal(length)
            amp = rng.uniform(0.6, 1.0)
            if name == "hiss":
                x += TONE_AMPLITUDE * amp * alternating
            elif name == "rumble":
                x += OFFSET_AMPLITUDE * amp
            signals.append(x)
            labels.append(name)
    return signals, labels


def discriminative_dims(config):
    """Feature indices of the ``A_L`` and ``D_1`` blocks for `config`."""
    k = config.coeffs_per_band
    d = config.dim
    return np.concatenate([np.arange(k), np.arange(d - k, d)])


def noise_dims(config):
    k = config.coeffs_per_band
    return np.arange(k, config.dim - k)


def write_embeddings(path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for name in CLASS_NAMES:
            w.writerow([name, *EMBEDDINGS[name]])
    return Path(path)


def write_wav_corpus(directory, n_per_class=60, length=1024, noise=1.0, seed=0):
    """Write the signals as 16-bit WAV files plus ``manifest.csv``.

    Each signal is peak-normalized to 0.9 before quantization.  Returns the
    manifest path.
    """
    from scipy.io import wavfile

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    signals, labels = planted_signals(n_per_class, length, noise, seed)
    manifest = directory / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "class_name", "path"])
        for i, (x, name) in enumerate(zip(signals, labels)):
            pcm = np.round(0.9 * x / np.max(np.abs(x)) * 32767).astype(np.int16)
            fname = f"{name}_{i:04d}.wav"
            wavfile.write(directory / fname, SAMPLE_RATE, pcm)
            w.writerow([f"s{i:04d}", name, fname])
    return manifest


def main(argv=None):
    """Write the WAV corpus and embeddings: ``python -m protometric.synthetic DIR``."""
    import argparse

    parser = argparse.ArgumentParser(description="write the planted-band corpus")
    parser.add_argument("directory")
    parser.add_argument("--per-class", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    manifest = write_wav_corpus(args.directory, args.per_class, seed=args.seed)
    write_embeddings(Path(args.directory) / "embeddings.csv")
    print(manifest)


if __name__ == "__main__":
    main()
