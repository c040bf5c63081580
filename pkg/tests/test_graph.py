from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATA, ascii_bitmap
from skgraph import synthetic as syn
from skgraph.errors import BackgroundPixelError, NotThinnedError
from skgraph.graph import FREEMAN, build_graph, chain_of, dump_graph, pixel_index, walk
from skgraph.raster import Bitmap, load_pbm
from skgraph.thinning import Skeleton, thin

RING = ascii_bitmap(
    """
    .##.
    #..#
    #..#
    .##.
    """
)

X = ascii_bitmap(
    """
    #...#
    .#.#.
    ..#..
    .#.#.
    #...#
    """
)


def skel(b: Bitmap) -> Skeleton:
    return Skeleton(b, 1.0)


def test_freeman_numbering():
    # 0 = East, counter-clockwise, rows grow downwards
    assert FREEMAN[0] == (1, 0) and FREEMAN[2] == (0, -1) and FREEMAN[6] == (0, 1)


def test_pixel_index():
    dot = Bitmap(np.pad([[1]], 1))
    assert pixel_index(dot, 1, 1) == 0
    line = Bitmap(np.ones((1, 5), np.uint8))
    assert pixel_index(line, 2, 0) == 2
    assert pixel_index(line, 0, 0) == 1
    assert pixel_index(X, 2, 2) == 4
    with pytest.raises(BackgroundPixelError):
        pixel_index(X, 1, 0)


def test_ring_gets_one_loop_node():
    g = build_graph(skel(RING))
    assert len(g.nodes) == 1 and len(g.branches) == 1
    assert g.n_loops == 1
    assert len(g.branches[0]) == 8
    assert g.branches[0].is_loop
    # smallest (y, x) pixel starts the loop
    assert g.nodes[0].xy == (1, 0)


def test_segment():
    m = np.zeros((3, 12), np.uint8)
    m[1, 1:11] = 1
    g = build_graph(skel(Bitmap(m)))
    assert [n.index for n in g.nodes] == [1, 1]
    assert len(g.branches) == 1 and g.n_loops == 0
    assert g.branches[0].chain == (0,) * 9


def test_x_crossing():
    g = build_graph(skel(X))
    assert sorted(n.index for n in g.nodes) == [1, 1, 1, 1, 4]
    assert len(g.branches) == 4


def test_fig2_raster():
    g = build_graph(thin(load_pbm((DATA / "fig2.pbm").read_bytes())))
    assert len(g.nodes) == 8
    assert len(g.branches) == 7


def test_not_thinned():
    with pytest.raises(NotThinnedError):
        build_graph(skel(Bitmap(np.ones((2, 2), np.uint8))))


def test_degenerate_index_warns():
    b = ascii_bitmap(
        """
        ###
        .#.
        #.#
        """
    )
    with pytest.warns(UserWarning, match="index 5"):
        g = build_graph(skel(b))
    assert (1, 1) in {n.xy for n in g.nodes}


def test_isolated_pixel_is_a_node():
    g = build_graph(skel(Bitmap(np.pad([[1]], 2))))
    assert len(g.nodes) == 1 and g.nodes[0].index == 0 and not g.branches


def test_dump_format():
    text = dump_graph(build_graph(skel(RING)))
    assert text.splitlines() == ["N 0 1 0 2", "B 0 0 loop " + "".join(map(str, build_graph(skel(RING)).branches[0].chain))]


def test_chain_round_trip():
    path = walk((3, 3), (0, 1, 2, 3, 4, 5, 6, 7))
    assert chain_of(path) == (0, 1, 2, 3, 4, 5, 6, 7)
    assert path[-1] == (3, 3)
    with pytest.raises(ValueError):
        chain_of([(0, 0), (2, 0)])


def check_graph(sk: Skeleton):
    g = build_graph(sk)
    nodes = {n.xy for n in g.nodes}
    ink = {(int(c), int(r)) for r, c in np.argwhere(sk.grid.pixels)}
    paths = g.paths()
    # handshake: every branch contributes two ends
    ends = Counter()
    for p in paths:
        ends[p[0]] += 1
        ends[p[-1]] += 1
    assert sum(ends.values()) == 2 * len(g.branches)
    assert all(ends[n.xy] == n.index for n in g.nodes)
    # every branch joins two nodes and runs along 8-adjacent line pixels
    interior = []
    for p in paths:
        assert p[0] in nodes and p[-1] in nodes
        for a, b in zip(p, p[1:]):
            assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1
        interior.extend(p[1:-1])
    # pixel conservation: interiors are disjoint and, with the nodes, cover the skeleton
    assert len(interior) == len(set(interior))
    assert not set(interior) & nodes
    assert set(interior) | nodes == ink
    assert len(interior) + len(nodes) == len(ink)
    assert build_graph(sk) == g
    return g


@given(st.integers(0, 2**32 - 1))
def test_random_graph_invariants(seed):
    check_graph(thin(syn.random_strokes(np.random.default_rng(seed), size=96)))


@given(st.integers(0, 2**32 - 1))
def test_random_blob_invariants(seed):
    check_graph(thin(syn.random_blob(np.random.default_rng(seed))))
