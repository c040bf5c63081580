"""Structural features of digits, how they move under rotation, and k-NN.

The first part prints the topology counts of each clean glyph and the
largest drift of any ratio feature when the glyph is rotated or scaled.
The second part classifies the bundled MNIST subset with k = 5.
"""

from pathlib import Path

import numpy as np

from skgraph import Bitmap, KnnClassifier, extract_features, model_from_bitmap
from skgraph import synthetic as syn
from skgraph.features import COUNT_SLOTS

DATA = Path(__file__).resolve().parents[1] / "tests" / "data" / "mnist_subset.npz"
RATIO = [i for i in range(20) if i not in COUNT_SLOTS]


def features(b):
    return extract_features(model_from_bitmap(b))


def glyph_table():
    print("glyph  ends junctions loops segments  worst drift (rotate / scale)")
    for name in syn.GLYPHS:
        b = syn.glyph(name)
        f0 = features(b).as_array()
        rot = max(np.abs(features(syn.rotate(b, a)).as_array() - f0)[RATIO].max() for a in (-45, -30, 30, 45))
        scale = max(np.abs(features(syn.upscale(b, s)).as_array() - f0)[RATIO].max() for s in (2, 3))
        counts = " ".join(f"{int(v):5d}" for v in f0[:4])
        print(f"  {name}    {counts}       {rot:.3f} / {scale:.3f}")


def mnist():
    d = np.load(DATA)

    def extract(images):
        return [features(Bitmap((im >= 128).astype(np.uint8))) for im in images]

    clf = KnnClassifier(list(zip(extract(d["train_images"]), d["train_labels"].tolist())), k=5)
    pred = np.array([clf.predict(f) for f in extract(d["test_images"])])
    truth = d["test_labels"]
    print(f"\nk-NN (k=5) on {len(truth)} test digits: error {np.mean(pred != truth):.1%}")
    for digit in range(10):
        sel = truth == digit
        print(f"  {digit}: {np.mean(pred[sel] == digit):.0%} of {sel.sum()}")


if __name__ == "__main__":
    glyph_table()
    mnist()
