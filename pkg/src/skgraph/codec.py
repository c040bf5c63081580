"""The SKG1 container: relative chain codes, run-length tokens, bit packing.

Layout (little-endian)::

    header   "SKG1" | version u8 | width u16 | height u16 | line width u8.8
             | anchor_count u16 | branch_count u16 | n_loops u16       (17 bytes)
    anchors  x u16 | y u16 | index u8                                  (5 bytes each)
    branches anchor u16 | heading u8 | chain_length u32 | payload      (7 bytes + payload)

The payload holds ``chain_length - 1`` turns, each -1, 0 or +1 (45 degree
units, positive = counter-clockwise).  The version byte has the format
number in its low nibble and flags in the high nibble: 0x10 selects the
base-3 packer instead of run-length tokens, 0x20 is reserved for per-point
line widths and rejected.

Run-length tokens follow a PackBits-like scheme.  A byte whose top two bits
are a symbol code (00 = -1, 01 = 0, 10 = +1) is a run of that turn with
length ``(byte & 63) + 1``.  Code 11 starts a literal block: ``k`` =
``(byte & 63) + 1`` bytes follow, each holding five turns as base-3 digits
(most significant first, digit = turn + 1).  Literal blocks carry the
jittery stretches of a digitized curve at 1.6 bits per step, while straight
stretches collapse into runs.  The byte 0xFF is not a literal header: it
marks a sharp turn and the next byte holds that turn plus 4.

The base-3 packer has no room for sharp turns, so there a branch holding a
turn sharper than 45 degrees is stored as consecutive records; every record
after the first starts at an extra anchor whose index byte is ``SPLIT`` and
is merged back on decode.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    BadMagicError,
    CorruptTokenError,
    CountMismatchError,
    DimensionOverflowError,
    SharpTurnError,
    TooManyAnchorsError,
    TruncatedError,
    UnsupportedVersionError,
)
from .graph import Branch, Node, walk
from .minimizer import MinimizedGraph, verify_counts

MAGIC = b"SKG1"
FORMAT = 1
FLAG_BASE3 = 0x10
FLAG_POINT_WIDTH = 0x20
SPLIT = 0x82

HEADER = struct.Struct("<4sBHHHHHH")
ANCHOR = struct.Struct("<HHB")
BRANCH = struct.Struct("<HBI")

RUN_CAP = 64
LITERAL_GROUP = 5  # 3**5 = 243 fits a byte
LITERAL_CAP = 63
SHARP_MARK = 0xFF

_CODE = {-1: 0, 0: 1, 1: 2}
_SYMBOL = (-1, 0, 1)


# --- relative coding ----------------------------------------------------


@dataclass(frozen=True)
class RelativeChain:
    initial_heading: int
    turns: tuple[int, ...]

    def absolute(self) -> tuple[int, ...]:
        out = [self.initial_heading]
        for t in self.turns:
            out.append((out[-1] + t) % 8)
        return tuple(out)


def turn_between(d1: int, d2: int) -> int:
    """Signed heading change from d1 to d2 in 45 degree units, in -4..3."""
    return (d2 - d1 + 4) % 8 - 4


def relativize(chain) -> RelativeChain:
    chain = tuple(chain)
    if not chain:
        raise ValueError("empty chain")
    turns = []
    for i, (a, b) in enumerate(zip(chain, chain[1:])):
        t = turn_between(a, b)
        if abs(t) > 1:
            raise SharpTurnError(i, t)
        turns.append(t)
    return RelativeChain(chain[0], tuple(turns))


def chain_turns(chain) -> tuple[int, ...]:
    """All heading changes along ``chain``, sharp ones included."""
    return tuple(turn_between(a, b) for a, b in zip(chain, chain[1:]))


def split_sharp(chain) -> list[int]:
    """Step positions where a new record must start because of a sharp turn."""
    return [i + 1 for i, (a, b) in enumerate(zip(chain, chain[1:])) if abs(turn_between(a, b)) > 1]


# --- run-length tokens --------------------------------------------------


class Run(NamedTuple):
    symbol: int
    length: int


class Literal(NamedTuple):
    """Turns stored verbatim, five per byte."""

    turns: tuple[int, ...]


class Sharp(NamedTuple):
    """One turn of 90 degrees or more."""

    turn: int


def _literal_bytes(n: int) -> int:
    return -(-n // LITERAL_GROUP)


def rle_encode(turns) -> list:
    """Tokenize turns into runs, literal blocks and sharp marks, using the fewest bytes.

    An optimal parse by dynamic programming; on ties the parse with plain
    runs wins.
    """
    s = list(turns)
    n = len(s)
    inf = float("inf")
    cost = [inf] * (n + 1)
    back = [None] * (n + 1)
    cost[0] = 0
    stop = n  # first sharp turn at or after i
    nxt = [n] * n
    for i in range(n - 1, -1, -1):
        if s[i] not in _CODE:
            stop = i
        nxt[i] = stop
    for i in range(n):
        c = cost[i]
        if c == inf:
            continue
        if s[i] not in _CODE:
            if c + 2 < cost[i + 1]:
                cost[i + 1], back[i + 1] = c + 2, (i, "sharp")
            continue
        j = i
        while j < n and s[j] == s[i] and j - i < RUN_CAP:
            j += 1
            if c + 1 <= cost[j]:
                cost[j], back[j] = c + 1, (i, "run")
        for k in range(1, LITERAL_CAP + 1):
            j = i + LITERAL_GROUP * k
            if j >= nxt[i]:
                # only the final literal may stop short of a full group
                j = nxt[i] if nxt[i] == n or (nxt[i] - i) % LITERAL_GROUP == 0 else None
            if j is not None and c + 1 + k < cost[j]:
                cost[j], back[j] = c + 1 + k, (i, "lit")
            if j is None or j >= nxt[i]:
                break
    out = []
    j = n
    while j:
        i, kind = back[j]
        if kind == "run":
            out.append(Run(s[i], j - i))
        elif kind == "lit":
            out.append(Literal(tuple(s[i:j])))
        else:
            out.append(Sharp(s[i]))
        j = i
    return out[::-1]


def rle_decode(tokens) -> list[int]:
    turns = []
    for tok in tokens:
        if isinstance(tok, Literal):
            if any(t not in _CODE for t in tok.turns):
                raise CorruptTokenError("literal holds a value outside -1, 0, +1")
            turns.extend(tok.turns)
            continue
        if isinstance(tok, Sharp):
            if not 2 <= abs(tok.turn) <= 4 or tok.turn == 4:
                raise CorruptTokenError(f"sharp mark holds turn {tok.turn}")
            turns.append(tok.turn)
            continue
        sym, length = tok
        if length < 1 or sym not in _CODE:
            raise CorruptTokenError(f"bad run token {tuple(tok)}")
        turns.extend([sym] * length)
    return turns


def pack(tokens) -> bytes:
    """One byte per run, two per sharp mark, a header byte plus base-3 groups per literal.

    Every literal but the last must hold a multiple of five turns; the last
    group of a final literal is padded with straight steps.
    """
    out = bytearray()
    tokens = list(tokens)
    for pos, tok in enumerate(tokens):
        if isinstance(tok, Literal):
            n = len(tok.turns)
            k = _literal_bytes(n)
            if not 1 <= k <= LITERAL_CAP or (n % LITERAL_GROUP and pos != len(tokens) - 1):
                raise ValueError(f"literal of {n} turns cannot be packed here")
            out.append(0xC0 | (k - 1))
            padded = list(tok.turns) + [0] * (k * LITERAL_GROUP - n)
            for g in range(k):
                v = 0
                for t in padded[g * LITERAL_GROUP : (g + 1) * LITERAL_GROUP]:
                    v = v * 3 + t + 1
                out.append(v)
            continue
        if isinstance(tok, Sharp):
            if not 2 <= abs(tok.turn) <= 4 or tok.turn == 4:
                raise ValueError(f"sharp mark cannot hold turn {tok.turn}")
            out += bytes((SHARP_MARK, tok.turn + 4))
            continue
        sym, length = tok
        if not 1 <= length <= RUN_CAP or sym not in _CODE:
            raise ValueError(f"token {tuple(tok)} out of range")
        out.append((_CODE[sym] << 6) | (length - 1))
    return bytes(out)


def unpack(data: bytes, expected_length: int) -> tuple[list, int]:
    """Read tokens until they expand to ``expected_length`` turns.

    Returns ``(tokens, bytes_consumed)``.
    """
    tokens = []
    total = pos = 0
    while total < expected_length:
        if pos >= len(data):
            raise TruncatedError(f"payload ended after {total} of {expected_length} turns")
        b = data[pos]
        pos += 1
        code = b >> 6
        if code < 3:
            tok = Run(_SYMBOL[code], (b & 0x3F) + 1)
            total += tok.length
        elif b == SHARP_MARK:
            if pos >= len(data):
                raise TruncatedError("payload ends inside a sharp mark")
            t = data[pos] - 4
            pos += 1
            if not 2 <= abs(t) <= 4 or t == 4:
                raise CorruptTokenError(f"sharp mark holds turn {t}")
            tok = Sharp(t)
            total += 1
        else:
            k = (b & 0x3F) + 1
            if pos + k > len(data):
                raise TruncatedError("payload ends inside a literal block")
            turns = []
            for v in data[pos : pos + k]:
                if v >= 3**LITERAL_GROUP:
                    raise CorruptTokenError(f"literal byte {v} is not five base-3 digits")
                group = []
                for _ in range(LITERAL_GROUP):
                    v, r = divmod(v, 3)
                    group.append(r - 1)
                turns.extend(reversed(group))
            pos += k
            keep = expected_length - total
            if len(turns) - keep >= LITERAL_GROUP:
                raise CorruptTokenError("literal block runs past the end of the branch")
            tok = Literal(tuple(turns[:keep]))
            total += len(tok.turns)
        tokens.append(tok)
    if total != expected_length:
        raise CorruptTokenError(f"tokens expand to {total} turns, expected {expected_length}")
    return tokens, pos


# --- base-3 packing -----------------------------------------------------


def _base3_size(n: int) -> int:
    return ((3**n - 1).bit_length() + 7) // 8 if n else 0


def _to_base3(value: int, n: int) -> str:
    if n <= 32:
        digits = []
        for _ in range(n):
            value, r = divmod(value, 3)
            digits.append("012"[r])
        return "".join(reversed(digits))
    lo_n = n // 2
    hi, lo = divmod(value, 3**lo_n)
    return _to_base3(hi, n - lo_n) + _to_base3(lo, lo_n)


def pack_base3(turns) -> bytes:
    """Exact radix conversion: ``len(turns)`` trits as one little-endian integer."""
    n = len(turns)
    if not n:
        return b""
    digits = "".join("012"[t + 1] for t in turns)
    return int(digits, 3).to_bytes(_base3_size(n), "little")


def unpack_base3(data: bytes, expected_length: int) -> tuple[list[int], int]:
    size = _base3_size(expected_length)
    if len(data) < size:
        raise TruncatedError(f"base-3 payload needs {size} bytes, found {len(data)}")
    if not expected_length:
        return [], 0
    value = int.from_bytes(data[:size], "little")
    if value >= 3**expected_length:
        raise CorruptTokenError("base-3 payload out of range")
    return [int(c) - 1 for c in _to_base3(value, expected_length)], size


def payload_bits_bound(length: int) -> int:
    """Upper bound ceil(L log2 3) + 8 bits for a branch of chain length L."""
    return math.ceil(length * math.log2(3)) + 8


# --- container ----------------------------------------------------------


def _records(m: MinimizedGraph, split: bool):
    """Branch records, with sharp turns split off when ``split``; returns (records, split anchors)."""
    splits = []
    recs = []
    base = len(m.anchors)
    for b in m.branches:
        cuts = split_sharp(b.chain) if split else []
        pix = walk(m.anchors[b.start_node].xy, b.chain)
        bounds = [0] + cuts + [len(b.chain)]
        for k, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
            if k == 0:
                owner = b.start_node
            else:
                owner = base + len(splits)
                splits.append(pix[lo])
            recs.append((owner, b.chain[lo:hi]))
    return recs, splits


def encode(m: MinimizedGraph, base3: bool = False) -> bytes:
    """Serialize a minimized graph as an SKG1 stream."""
    if not (0 <= m.width < 65536 and 0 <= m.height < 65536):
        raise DimensionOverflowError(f"{m.width}x{m.height} does not fit 16-bit fields")
    recs, splits = _records(m, base3)
    n_anchor = len(m.anchors) + len(splits)
    if n_anchor >= 65536 or len(recs) >= 65536:
        raise TooManyAnchorsError(f"{n_anchor} anchors / {len(recs)} records exceed 65535")
    if m.n_loops >= 65536:
        raise TooManyAnchorsError(f"{m.n_loops} loops exceed 65535")
    width_fx = min(0xFFFF, round(m.avg_line_width * 256))
    version = FORMAT | (FLAG_BASE3 if base3 else 0)
    out = [HEADER.pack(MAGIC, version, m.width, m.height, width_fx, n_anchor, len(recs), m.n_loops)]
    for a in m.anchors:
        out.append(ANCHOR.pack(a.x, a.y, a.index))
    for x, y in splits:
        out.append(ANCHOR.pack(x, y, SPLIT))
    for owner, chain in recs:
        out.append(BRANCH.pack(owner, chain[0], len(chain)))
        if base3:
            out.append(pack_base3(relativize(chain).turns))
        else:
            out.append(pack(rle_encode(chain_turns(chain))))
    return b"".join(out)


@dataclass(frozen=True)
class StreamInfo:
    """Per-stream totals used by the ``stats`` report."""

    version: int
    records: int
    split_anchors: int
    chain_steps: int
    payload_bytes: int


def _read(data, pos, st: struct.Struct, what):
    if pos + st.size > len(data):
        raise TruncatedError(f"stream ends inside {what}")
    return st.unpack_from(data, pos), pos + st.size


def decode_with_info(data: bytes) -> tuple[MinimizedGraph, StreamInfo]:
    data = bytes(data)
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}")
    (_, version, width, height, width_fx, n_anchor, n_rec, n_loops), pos = _read(data, 0, HEADER, "header")
    if version & 0x0F != FORMAT or version & ~(FLAG_BASE3 | 0x0F):
        raise UnsupportedVersionError(f"unsupported version byte 0x{version:02x}")
    base3 = bool(version & FLAG_BASE3)

    raw = []
    for k in range(n_anchor):
        (x, y, index), pos = _read(data, pos, ANCHOR, f"anchor {k}")
        raw.append((x, y, index))
    n_real = 0
    while n_real < n_anchor and raw[n_real][2] != SPLIT:
        n_real += 1
    if any(r[2] != SPLIT for r in raw[n_real:]):
        raise CountMismatchError("split anchors must follow regular anchors")

    chains = []  # [owner anchor, list of directions]
    steps = payload = 0
    for k in range(n_rec):
        (owner, heading, length), pos = _read(data, pos, BRANCH, f"branch {k}")
        if owner >= n_anchor or heading > 7 or length < 1:
            raise CountMismatchError(f"branch record {k} is inconsistent")
        start = pos
        if base3:
            turns, used = unpack_base3(data[pos:], length - 1)
        else:
            tokens, used = unpack(data[pos:], length - 1)
            turns = rle_decode(tokens)
        pos += used
        payload += pos - start
        steps += length
        chain = list(RelativeChain(heading, tuple(turns)).absolute())
        if owner >= n_real:
            if not chains:
                raise CountMismatchError("split record without a preceding branch")
            prev_owner, prev = chains[-1]
            if walk(raw[prev_owner][:2], prev)[-1] != raw[owner][:2]:
                raise CountMismatchError(f"split record {k} does not continue its branch")
            prev.extend(chain)
        else:
            chains.append((owner, chain))
    if pos != len(data):
        raise CountMismatchError(f"{len(data) - pos} trailing bytes after the branch table")

    anchors_xy = {(x, y): i for i, (x, y, _) in enumerate(raw[:n_real])}
    branches = []
    refs = [[] for _ in range(n_real)]
    for i, (owner, chain) in enumerate(chains):
        end = walk(raw[owner][:2], chain)[-1]
        branches.append(Branch(i, owner, tuple(chain), anchors_xy.get(end)))
        refs[owner].append(i)
    anchors = tuple(Node(i, x, y, idx, tuple(refs[i])) for i, (x, y, idx) in enumerate(raw[:n_real]))
    m = MinimizedGraph(anchors, tuple(branches), n_loops, width, height, width_fx / 256)
    _check_counts(m)
    info = StreamInfo(version, n_rec, n_anchor - n_real, steps, payload)
    return m, info


def _check_counts(m: MinimizedGraph) -> None:
    rep = verify_counts(m)
    if not rep.consistent:
        raise CountMismatchError(
            f"branch count {rep.observed} does not match (N1 + 3*N3)/2 + N_loops = {rep.predicted}"
        )
    # a stored index counts the anchor's branch ends plus two per branch
    # that was concatenated through it
    ends = {a.xy: 0 for a in m.anchors}
    for p in m.paths():
        for q in (p[0], p[-1]):
            if q in ends:
                ends[q] += 1
    for a in m.anchors:
        e = ends[a.xy]
        if a.index > 3 or e > a.index or (a.index - e) % 2:
            raise CountMismatchError(f"anchor ({a.x}, {a.y}) stores index {a.index} but has {e} branch ends")


def decode(data: bytes) -> MinimizedGraph:
    """Parse an SKG1 stream and check its branch-count consistency."""
    return decode_with_info(data)[0]
