"""Walk the pipeline on a pair of handwritten digits.

The committed raster holds a looped "2" next to an open "4".  Thinning the
"2" splits its self-crossing into two junctions, so the raw graph has eight
nodes.  Lossless smoothing folds the crossing back into one stroke, and the
minimizer keeps just two anchors: the start of the "2" and the junction of
the "4".
"""

from pathlib import Path

from skgraph import SmoothingParams, build_graph, encode, load_pbm, minimize, smooth, thin, verify_counts
from skgraph.graph import dump_graph

RASTER = Path(__file__).resolve().parents[1] / "tests" / "data" / "fig2.pbm"


def show(title, g):
    nodes = g._node_list()
    print(f"{title}: {len(nodes)} nodes, {len(g.branches)} branches")
    for n in nodes:
        print(f"    node at ({n.x:2d}, {n.y:2d}) with {n.index} branch ends")


def main():
    image = load_pbm(RASTER.read_bytes())
    skel = thin(image)
    print(f"{image.width}x{image.height} image, {image.count()} ink pixels, "
          f"stroke width {skel.avg_line_width:.2f}")

    raw = build_graph(skel)
    show("raw graph", raw)
    smoothed = smooth(raw, SmoothingParams(mode="lossless"))
    show("after lossless smoothing", smoothed)
    model = minimize(smoothed)
    show("minimized", model)

    rep = verify_counts(model)
    print(f"N1={rep.n1_min} N3={rep.n3_min} loops={rep.n_loops}: "
          f"predicted {rep.predicted} branches, observed {rep.observed}")
    data = encode(model)
    print(f"container: {len(data)} bytes against {(image.width * image.height + 7) // 8} raw")
    print()
    print(dump_graph(model))


if __name__ == "__main__":
    main()
