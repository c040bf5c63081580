import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from skgraph.errors import (
    DimensionMismatchError,
    MalformedHeaderError,
    TruncatedError,
    UnsupportedMagicError,
)
from skgraph.raster import Bitmap, binarize, load_pbm, packed_size, save_pbm, save_pbm_ascii

bitmaps = st.tuples(st.integers(1, 64), st.integers(1, 64)).flatmap(
    lambda hw: arrays(np.uint8, hw, elements=st.integers(0, 1))
).map(Bitmap)


def test_load_p1():
    b = load_pbm(b"P1\n2 2\n1 0\n0 1\n")
    assert b.width == 2 and b.height == 2
    assert b.pixels.ravel().tolist() == [1, 0, 0, 1]


def test_load_p1_with_comments_and_packed_digits():
    b = load_pbm(b"P1\n# a comment\n3 1\n101")
    assert b.pixels.tolist() == [[1, 0, 1]]


def test_load_p4_discards_row_padding():
    b = load_pbm(b"P4\n9 1\n" + bytes([0xFF, 0x80]))
    assert b.pixels.tolist() == [[1] * 9]


def test_save_single_pixel():
    assert save_pbm(Bitmap(np.ones((1, 1), np.uint8))) == b"P4\n1 1\n\x80"


def test_save_full_byte():
    assert save_pbm(Bitmap(np.ones((1, 8), np.uint8))).endswith(b"\xff")


def test_p4_examples_round_trip():
    for data in (b"P4\n9 1\n\xff\x80", b"P4\n1 1\n\x80", b"P4\n8 1\n\xff"):
        assert save_pbm(load_pbm(data)) == data


def test_header_whitespace_is_normalized():
    assert save_pbm(load_pbm(b"P4  3\n\n 2\n\xa0\x40")) == b"P4\n3 2\n\xa0\x40"


@given(bitmaps)
def test_round_trip(b):
    assert load_pbm(save_pbm(b)) == b
    assert load_pbm(save_pbm_ascii(b)) == b


@pytest.mark.parametrize(
    "data, error",
    [
        (b"P2\n1 1\n0\n", UnsupportedMagicError),
        (b"", UnsupportedMagicError),
        (b"P4\n3", MalformedHeaderError),
        (b"P4\nx 1\n\x00", MalformedHeaderError),
        (b"P4\n0 1\n", MalformedHeaderError),
        (b"P4\n16 2\n\x00\x00\x00", TruncatedError),
        (b"P1\n2 2\n1 0 1", TruncatedError),
        (b"P1\n1 1\n2", MalformedHeaderError),
    ],
)
def test_load_errors(data, error):
    with pytest.raises(error):
        load_pbm(data)


def test_bitmap_invariants():
    with pytest.raises(ValueError):
        Bitmap(np.array([[0, 2]]))
    with pytest.raises(DimensionMismatchError):
        Bitmap(np.zeros((0, 3)))
    b = Bitmap(np.zeros((2, 3), np.uint8), dpi=100)
    assert b.dpi == 100 and b.shape == (2, 3)
    assert not b.pixels.flags.writeable


def test_binarize_extremes():
    assert binarize(np.full(16, 255), 4, 4, 128).count() == 0
    assert binarize(np.zeros(16), 4, 4, 128).count() == 16


def test_binarize_ramp():
    ramp = np.arange(256, dtype=np.uint8)
    b = binarize(ramp, 16, 16, 128)
    # oracle: direct enumeration of intensities below the threshold
    assert b.count() == sum(1 for v in range(256) if v < 128) == 128
    assert b.pixels.ravel()[:128].all() and not b.pixels.ravel()[128:].any()


def test_binarize_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        binarize(np.zeros(10), 4, 4)


@given(arrays(np.uint8, 64), st.integers(0, 255), st.integers(0, 255))
def test_binarize_monotone(gray, t1, t2):
    lo, hi = sorted((t1, t2))
    a = binarize(gray, 8, 8, lo).pixels
    b = binarize(gray, 8, 8, hi).pixels
    assert np.all(a <= b)


def test_packed_size():
    assert packed_size(Bitmap.blank(9, 1)) == 2
    assert packed_size(Bitmap.blank(8, 8)) == 8
