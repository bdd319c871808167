"""
Training on planted bands
=========================

The bundled synthetic set has three classes: ``hiss`` (a tone in D1),
``rumble`` (a DC offset in A5) and ``static`` (noise only).  After training
the metric weights on those two blocks should exceed the rest.
"""

import numpy as np

from protometric import (
    ClassRegistry,
    Dataset,
    WaveletConfig,
    build_adjacency,
    explain,
    extract_features,
    predict,
    train,
)
from protometric.synthetic import EMBEDDINGS, discriminative_dims, noise_dims, planted_signals

cfg = WaveletConfig()
signals, names = planted_signals()
reg = ClassRegistry.from_names(names)
X = np.vstack([extract_features(x, cfg) for x in signals])
data = Dataset(np.array([reg.id_of(n) for n in names]), X)

# three classes leave room for at most two neighbors each
graph = build_adjacency(reg, EMBEDDINGS, k=2)
model = train(data, reg, graph, wavelet_config=cfg)

totals = [e.total for e in model.energy_trace]
print(f"{len(totals) - 1} iterations, stopped by {model.stop_reason}")
print(f"energy {totals[0]:.3f} -> {totals[-1]:.3f}")
print("training accuracy:", np.mean(predict(X, model) == data.labels))

###############################################################################
# Mean learned weight per band.  Only ratios matter: the energy can always
# lower attachment by shrinking every weight, so absolute values end up small.

a = model.weights
print("discriminative / noise weight:",
      a[discriminative_dims(cfg)].mean() / a[noise_dims(cfg)].mean())
for band, w in explain(model)["band_importance"]:
    print(f"{band:>3} {w:.3e}")
