import math
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATA
from skgraph import synthetic as syn
from skgraph.codec import (
    HEADER,
    SPLIT,
    Literal,
    RelativeChain,
    Run,
    Sharp,
    chain_turns,
    decode,
    decode_with_info,
    encode,
    pack,
    pack_base3,
    payload_bits_bound,
    relativize,
    rle_decode,
    rle_encode,
    split_sharp,
    turn_between,
    unpack,
    unpack_base3,
)
from skgraph.errors import (
    BadMagicError,
    CorruptTokenError,
    CountMismatchError,
    DimensionOverflowError,
    SharpTurnError,
    TruncatedError,
    UnsupportedVersionError,
)
from skgraph.graph import build_graph
from skgraph.minimizer import MinimizedGraph, minimize
from skgraph.pipeline import model_from_bitmap
from skgraph.raster import Bitmap, load_pbm
from skgraph.smoothing import LOSSLESS, SmoothingParams, smooth
from skgraph.thinning import Skeleton, thin

turns3 = st.lists(st.sampled_from([-1, 0, 1]), max_size=400)
runs_heavy = st.lists(st.tuples(st.sampled_from([-1, 0, 1]), st.integers(1, 90)), max_size=12).map(
    lambda rs: [s for s, n in rs for _ in range(n)]
)
any_turns = st.lists(st.sampled_from([-3, -2, -1, 0, 1, 2, 3, -4]), max_size=200)


def straight_model(n=100) -> MinimizedGraph:
    m = np.zeros((3, n + 2), np.uint8)
    m[1, 1 : n + 1] = 1
    return minimize(build_graph(Skeleton(Bitmap(m), 1.0)))


def fig2_model() -> MinimizedGraph:
    return model_from_bitmap(load_pbm((DATA / "fig2.pbm").read_bytes()), LOSSLESS)


# --- relative coding ----------------------------------------------------


def test_relativize_examples():
    assert relativize([0, 0, 0, 0]) == RelativeChain(0, (0, 0, 0))
    assert relativize([0, 1, 2, 3]) == RelativeChain(0, (1, 1, 1))
    rc = relativize([2, 1, 2, 2, 3])
    assert rc == RelativeChain(2, (-1, 1, 0, 1))
    assert rc.absolute() == (2, 1, 2, 2, 3)


def test_relativize_wraps_around():
    assert relativize([7, 0, 7]).turns == (1, -1)


def test_sharp_turn_rejected():
    with pytest.raises(SharpTurnError) as info:
        relativize([0, 0, 2])
    assert info.value.position == 1 and info.value.turn == 2


@given(st.integers(0, 7), st.integers(0, 7))
def test_turn_between(a, b):
    t = turn_between(a, b)
    assert -4 <= t <= 3 and (a + t) % 8 == b


@given(st.lists(st.integers(0, 7), min_size=1, max_size=50))
def test_chain_turns_replay(chain):
    out = [chain[0]]
    for t in chain_turns(chain):
        out.append((out[-1] + t) % 8)
    assert out == chain
    cuts = split_sharp(chain)
    assert all(abs(turn_between(chain[i - 1], chain[i])) > 1 for i in cuts)


# --- run-length tokens --------------------------------------------------


def test_rle_examples():
    assert rle_encode([0] * 100) == [Run(0, 64), Run(0, 36)]
    assert rle_encode([]) == []
    assert rle_decode([]) == []


def test_pack_examples():
    assert pack([Run(0, 64)]) == bytes([0b01_111111])
    assert pack([Run(-1, 1), Run(1, 2)]) == bytes([0b00_000000, 0b10_000001])
    assert pack([]) == b""
    # five turns as base-3 digits, most significant first: 2,1,0,1,2
    assert pack([Literal((1, 0, -1, 0, 1))]) == bytes([0xC0, 2 * 81 + 27 + 3 + 2])
    assert pack([Sharp(2)]) == bytes([0xFF, 6])


def test_pack_rejects_bad_tokens():
    for tok in (Run(0, 0), Run(0, 65), Run(2, 1), Sharp(1), Sharp(4)):
        with pytest.raises(ValueError):
            pack([tok])
    with pytest.raises(ValueError):
        pack([Literal((0, 0, 0)), Run(0, 1)])  # short literal before the end


def test_rle_decode_rejects_empty_run():
    with pytest.raises(CorruptTokenError):
        rle_decode([Run(0, 0)])


@given(turns3)
def test_rle_round_trip(turns):
    tokens = rle_encode(turns)
    assert rle_decode(tokens) == turns
    packed = pack(tokens)
    back, used = unpack(packed + b"\x00junk", len(turns))
    assert used == len(packed)
    assert rle_decode(back) == turns


@given(any_turns)
def test_rle_round_trip_with_sharp_turns(turns):
    packed = pack(rle_encode(turns))
    assert rle_decode(unpack(packed, len(turns))[0]) == turns


@given(turns3)
def test_rle_never_worse_than_all_literal(turns):
    n = len(turns)
    groups = -(-n // 5)
    assert len(pack(rle_encode(turns))) <= groups + -(-groups // 63)


@given(runs_heavy)
def test_runs_cost_one_byte_per_64(turns):
    runs = sum(1 for i, t in enumerate(turns) if i == 0 or turns[i - 1] != t)
    assert len(pack(rle_encode(turns))) <= runs + len(turns) // 64


@pytest.mark.parametrize("n", [1, 2, 16, 50, 200, 1000])
def test_alternating_within_budget(n):
    turns = [(-1) ** i for i in range(n)]
    size = len(pack(rle_encode(turns)))
    assert size <= n
    if n >= 50:
        assert size * 8 <= 2 * n


def test_unpack_errors():
    with pytest.raises(TruncatedError):
        unpack(b"", 3)
    with pytest.raises(TruncatedError):
        unpack(b"\xc1\x00", 10)
    with pytest.raises(TruncatedError):
        unpack(b"\xff", 1)
    with pytest.raises(CorruptTokenError):
        unpack(b"\xff\x05", 1)  # sharp mark holding a gentle turn
    with pytest.raises(CorruptTokenError):
        unpack(b"\xc0\xf3", 5)  # 243 is not five base-3 digits
    with pytest.raises(CorruptTokenError):
        unpack(b"\x43", 3)  # run of four for three turns
    with pytest.raises(CorruptTokenError):
        unpack(b"\xc1\x00\x00", 4)  # literal of ten for four turns


# --- base-3 packer ------------------------------------------------------


@given(turns3)
def test_base3_round_trip_and_bound(turns):
    data = pack_base3(turns)
    assert unpack_base3(data, len(turns)) == (turns, len(data))
    assert len(data) * 8 <= payload_bits_bound(len(turns))


def test_base3_size():
    assert pack_base3([]) == b""
    assert len(pack_base3([1] * 5)) == 1  # 3**5 = 243 fits a byte
    assert payload_bits_bound(16) == math.ceil(16 * math.log2(3)) + 8 == 34
    # the bound drops below 2 L bits from L = 22 on
    assert payload_bits_bound(21) >= 42
    assert all(payload_bits_bound(n) < 2 * n for n in range(22, 2000))


def test_base3_errors():
    with pytest.raises(TruncatedError):
        unpack_base3(b"\x00", 20)
    with pytest.raises(CorruptTokenError):
        unpack_base3(b"\xff", 5)


# --- container ----------------------------------------------------------


def test_empty_model_is_header_only():
    m = minimize(build_graph(Skeleton(Bitmap.blank(5, 4), 1.0)))
    data = encode(m)
    assert len(data) == HEADER.size == 17
    assert HEADER.unpack(data) == (b"SKG1", 1, 5, 4, 256, 0, 0, 0)
    assert decode(data) == m


def test_straight_branch_size():
    data = encode(straight_model(100))
    assert len(data) <= 17 + 5 + 8 + 2
    assert data.hex() == "534b4731016600030000010100010000000100010001000000630000007f61"


def test_header_fields_little_endian():
    m = fig2_model()
    data = encode(m)
    magic, version, w, h, width_fx, n_anchor, n_branch, n_loops = struct.unpack_from("<4sBHHHHHH", data)
    assert (magic, version, w, h) == (b"SKG1", 1, 95, 53)
    assert width_fx == round(m.avg_line_width * 256)
    assert (n_anchor, n_branch, n_loops) == (2, 4, 0)
    assert struct.unpack_from("<HHB", data, 17) == (9, 16, 1)


def test_fig2_round_trip():
    m = fig2_model()
    assert decode(encode(m)) == m
    assert decode(encode(m, base3=True)) == m


def test_sharp_turns_split_in_base3_mode():
    # a V: the sharp bottom turn is split off into a second record
    m = np.zeros((8, 14), np.uint8)
    for k in range(6):
        m[1 + k, 1 + k] = m[1 + k, 11 - k] = 1
    mm = minimize(build_graph(Skeleton(Bitmap(m), 1.0)))
    data = encode(mm, base3=True)
    back, info = decode_with_info(data)
    assert back == mm
    assert info.split_anchors == 1 and info.records == 2
    assert len(mm.anchors) == 1
    assert data[17 + 5 + 4] == SPLIT
    # the run-length packer keeps one record and marks the turn in-stream
    back, info = decode_with_info(encode(mm))
    assert back == mm and info.split_anchors == 0 and info.records == 1


def test_deterministic():
    assert encode(fig2_model()) == encode(fig2_model())


def test_dimension_overflow():
    m = MinimizedGraph((), (), 0, 70000, 4)
    with pytest.raises(DimensionOverflowError):
        encode(m)


def test_corruption_classes():
    data = encode(fig2_model())
    with pytest.raises(BadMagicError):
        decode(b"SKG2" + data[4:])
    with pytest.raises(BadMagicError):
        decode(b"")
    for cut in (3, 10, 20, 30, len(data) - 1):
        with pytest.raises((TruncatedError, BadMagicError)):
            decode(data[:cut])
    loops = bytearray(data)
    loops[15] += 1  # n_loops
    with pytest.raises(CountMismatchError):
        decode(bytes(loops))
    with pytest.raises(CountMismatchError):
        decode(data + b"\x00")


@pytest.mark.parametrize("version", [0x02, 0x21, 0x31, 0x41])
def test_unsupported_version(version):
    data = bytearray(encode(fig2_model()))
    data[4] = version
    with pytest.raises(UnsupportedVersionError):
        decode(bytes(data))


def test_anchor_index_checked():
    data = bytearray(encode(fig2_model()))
    data[17 + 4] = 2  # the endpoint anchor claims an even number of ends
    with pytest.raises(CountMismatchError):
        decode(bytes(data))


@given(st.integers(0, 2**32 - 1), st.booleans(), st.booleans())
def test_random_round_trip(seed, lossless, base3):
    rng = np.random.default_rng(seed)
    b = syn.random_strokes(rng, size=int(rng.integers(64, 160)))
    g = build_graph(thin(b))
    m = minimize(smooth(g, LOSSLESS if lossless else SmoothingParams()))
    data = encode(m, base3=base3)
    assert decode(data) == m
    assert encode(decode(data), base3=base3) == data
