"""
Wavelet band features
=====================

A signal is split into one approximation band and L detail bands, and the
k largest-magnitude coefficients of each band are stacked into a feature
vector.  The transform is orthogonal, so no energy is lost.
"""

import numpy as np

from protometric import WaveletConfig, dwt_decompose, extract_features, reconstruct

rng = np.random.default_rng(0)
t = np.arange(1024)

# a slow ramp plus a fast alternating tone
x = 0.002 * t + 0.5 * np.where(t % 2 == 0, 1.0, -1.0) + 0.1 * rng.normal(size=t.size)

cfg = WaveletConfig(family="db4", levels=5, coeffs_per_band=4)
bands = dwt_decompose(x, cfg)

###############################################################################
# Where does the energy go?  The ramp sits in A5 and the tone in D1.

total = np.dot(x, x)
for name, band in zip(cfg.band_names(), bands.bands()):
    share = np.dot(band, band) / total
    print(f"{name:>3}  {band.size:4d} coeffs  {share:6.1%} of energy")

print("energy kept:", bands.energy() / total)
print("round-trip error:", np.max(np.abs(reconstruct(bands, cfg) - x)))

###############################################################################
# The feature vector has (L+1)*k entries, laid out A5, D5, ..., D1.

v = extract_features(x, cfg)
for label, value in zip(cfg.dimension_labels(), v):
    print(f"{label:6s} {value:+.3f}")
