import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import ndimage as ndi

from skgraph import synthetic as syn
from skgraph.raster import Bitmap
from skgraph.thinning import blocks, measure_line_width, thin

EIGHT = np.ones((3, 3), bool)
FOUR = ndi.generate_binary_structure(2, 1)


def components(mask) -> int:
    return ndi.label(mask, EIGHT)[1]


def is_simple(win: np.ndarray) -> bool:
    """Independent simple-point test on a 3x3 window with an ink centre.

    The centre can go without changing topology iff its ink neighbours form
    one 8-component and the background touching it forms one 4-component.
    A pixel with at most one neighbour is a stroke end and is kept.
    """
    ink = win.copy()
    ink[1, 1] = False
    if ink.sum() <= 1:
        return False
    bg = ~win
    lab, _ = ndi.label(bg, FOUR)
    touching = {lab[r, c] for r, c in ((0, 1), (1, 0), (1, 2), (2, 1)) if bg[r, c]}
    return components(ink) == 1 and len(touching) == 1


def check_skeleton(b: Bitmap):
    src = b.pixels.astype(bool)
    sk = thin(b)
    g = sk.grid.pixels.astype(bool)
    assert not (g & ~src).any(), "skeleton leaves the source"
    assert components(g) == components(src)
    assert thin(sk.grid).grid == sk.grid
    assert len(blocks(g)) == 0
    p = np.pad(g, 1)
    for r, c in np.argwhere(p):
        assert not is_simple(p[r - 1 : r + 2, c - 1 : c + 2]), (r - 1, c - 1)
    assert sk.avg_line_width >= 1.0


def test_empty():
    sk = thin(Bitmap.blank(10, 10))
    assert sk.grid.count() == 0
    assert sk.avg_line_width == 1.0


def test_thin_line_unchanged():
    m = np.zeros((5, 30), np.uint8)
    m[2, 5:25] = 1
    sk = thin(Bitmap(m))
    assert sk.grid == Bitmap(m)
    assert sk.avg_line_width == 1.0


def test_bar_three_wide():
    m = np.pad(np.ones((3, 20), np.uint8), 2)
    sk = thin(Bitmap(m))
    g = sk.grid.pixels
    assert g[3].sum() == 20 and g.sum() == 20
    assert abs(sk.avg_line_width - 60 / 20) <= 0.5


def test_measure_line_width():
    m = np.zeros((9, 24), np.uint8)
    m[2:7, 2:22] = 1
    skel = np.zeros_like(m)
    skel[4, 2:22] = 1
    assert measure_line_width(Bitmap(m), Bitmap(skel)) == 5.0
    assert measure_line_width(Bitmap(skel), Bitmap(skel)) == 1.0
    assert measure_line_width(Bitmap(m), Bitmap.blank(24, 9)) == 1.0


def test_disc_width_pinned():
    d = Bitmap(np.pad(syn.disc(6), 2).astype(np.uint8))
    sk = thin(d)
    assert d.count() == 113
    assert sk.avg_line_width == pytest.approx(113 / 15)
    assert 3 <= sk.avg_line_width <= 13


def test_thick_cross_has_no_block():
    # a plus sign of width 4 leaves a 2x2 core that must be rewired
    m = np.zeros((24, 24), np.uint8)
    m[10:14, 2:22] = 1
    m[2:22, 10:14] = 1
    check_skeleton(Bitmap(m))


def test_deterministic():
    b = syn.random_blob(np.random.default_rng(3))
    assert thin(b) == thin(b)


@given(st.integers(0, 2**32 - 1))
def test_blob_properties(seed):
    check_skeleton(syn.random_blob(np.random.default_rng(seed)))


@given(st.integers(0, 2**32 - 1))
def test_stroke_properties(seed):
    check_skeleton(syn.random_strokes(np.random.default_rng(seed), size=96))
