"""
Command-line pipeline
=====================

The same steps through the ``protometric`` command: write a WAV corpus,
extract features, build the class graph, train, predict and explain.
Files go to a temporary directory.
"""

import sys
import tempfile
from pathlib import Path

from protometric.cli import main
from protometric.synthetic import write_embeddings, write_wav_corpus

work = Path(tempfile.mkdtemp(prefix="protometric-"))
manifest = write_wav_corpus(work / "wav")
emb = write_embeddings(work / "embeddings.csv")

steps = [
    ["extract", "--manifest", str(manifest), "--out", str(work / "features.csv")],
    ["graph", "--embeddings", str(emb), "--k-neighbors", "2", "--out", str(work / "adjacency.csv")],
    ["train", "--features", str(work / "features.csv"), "--adjacency", str(work / "adjacency.csv"),
     "--model", str(work / "model.json"), "--trace", str(work / "trace.csv")],
    ["predict", "--model", str(work / "model.json"), "--features", str(work / "features.csv"),
     "--out", str(work / "predictions.csv")],
    ["explain", "--model", str(work / "model.json"), "--top", "10"],
]
for argv in steps:
    print("$ protometric", " ".join(argv))
    code = main(argv)
    if code:
        sys.exit(code)

print((work / "predictions.csv").read_text().splitlines()[:4])
print("outputs in", work)
