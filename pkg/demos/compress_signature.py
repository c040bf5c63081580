"""Compress a synthetic signature and a page of handwriting, then rebuild them.

Writes the source, the decoded skeleton and the thickened reproduction as
PBM files into the directory given on the command line (default: a fresh
temporary directory) so they can be compared side by side.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from skgraph import bitmap_from_model, decode, encode, model_from_bitmap, packed_size, save_pbm
from skgraph import synthetic as syn
from skgraph.render import rasterize_skeleton


def run(name, image, out: Path):
    model = model_from_bitmap(image)
    data = encode(model)
    base3 = encode(model, base3=True)
    back = decode(data)
    steps = back.total_length()
    print(f"{name}: {packed_size(image)} raw bytes -> {len(data)} bytes "
          f"(ratio {packed_size(image) / len(data):.1f}); "
          f"{len(back.anchors)} anchors, {len(back.branches)} branches, {steps} chain steps; "
          f"base-3 packer {len(base3)} bytes")
    (out / f"{name}.pbm").write_bytes(save_pbm(image))
    (out / f"{name}.skg").write_bytes(data)
    (out / f"{name}_skeleton.pbm").write_bytes(save_pbm(rasterize_skeleton(back)))
    (out / f"{name}_decoded.pbm").write_bytes(save_pbm(bitmap_from_model(back)))


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="skgraph-"))
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(11)
    run("signature", syn.signature(rng), out)
    run("handwriting", syn.handwriting(rng), out)
    print(f"files written to {out}")


if __name__ == "__main__":
    main()
