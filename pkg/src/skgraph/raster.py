"""Binary rasters and the PBM (P1/P4) interchange format.

Foreground convention: 1 = ink, 0 = paper.  PBM uses the same convention
(1 = black), so pixels are stored exactly as they appear in the file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    MalformedHeaderError,
    TruncatedError,
    UnsupportedMagicError,
)


@dataclass(frozen=True, eq=False)
class Bitmap:
    """Immutable binary raster.

    ``pixels`` is a read-only ``(height, width)`` uint8 array holding only
    0 and 1.  ``dpi`` is carried as metadata and never used for scaling.
    """

    pixels: np.ndarray
    dpi: int | None = field(default=None)

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatchError(f"bitmap must be 2-D and non-empty, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("bitmap pixels must be 0 or 1")
        if self.dpi is not None and self.dpi <= 0:
            raise ValueError("dpi must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def blank(cls, width: int, height: int, dpi: int | None = None) -> Bitmap:
        return cls(np.zeros((height, width), dtype=np.uint8), dpi)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def count(self) -> int:
        """Number of foreground pixels."""
        return int(self.pixels.sum())

    def mask(self) -> np.ndarray:
        """Writable boolean copy of the pixel grid."""
        return self.pixels.astype(bool)

    def __eq__(self, other):
        if not isinstance(other, Bitmap):
            return NotImplemented
        return self.dpi == other.dpi and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"Bitmap({self.width}x{self.height}, ink={self.count()}, dpi={self.dpi})"


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    tokens = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedHeaderError("PBM header ended early")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def load_pbm(data: bytes) -> Bitmap:
    """Parse a P1 (ASCII) or P4 (packed binary) PBM stream."""
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise UnsupportedMagicError(f"unsupported magic {magic!r}")
    (w_tok, h_tok), pos = _header_tokens(data, 2, 2)
    try:
        width, height = int(w_tok), int(h_tok)
    except ValueError:
        raise MalformedHeaderError(f"bad dimensions {w_tok!r} {h_tok!r}") from None
    if width <= 0 or height <= 0:
        raise MalformedHeaderError(f"non-positive dimensions {width}x{height}")

    if magic == b"P1":
        digits = re.sub(rb"#[^\n]*", b"", data[pos:])
        digits = bytes(c for c in digits if not chr(c).isspace())
        if len(digits) < width * height:
            raise TruncatedError(f"expected {width * height} pixels, found {len(digits)}")
        vals = np.frombuffer(digits[: width * height], dtype=np.uint8) - ord("0")
        if vals.max(initial=0) > 1:
            raise MalformedHeaderError("P1 raster contains characters other than 0/1")
        return Bitmap(vals.reshape(height, width))

    # P4: exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or not chr(data[pos]).isspace():
        raise MalformedHeaderError("missing whitespace after P4 header")
    pos += 1
    row_bytes = (width + 7) // 8
    payload = data[pos : pos + row_bytes * height]
    if len(payload) < row_bytes * height:
        raise TruncatedError(f"expected {row_bytes * height} raster bytes, found {len(payload)}")
    packed = np.frombuffer(payload, dtype=np.uint8).reshape(height, row_bytes)
    bits = np.unpackbits(packed, axis=1, bitorder="big")[:, :width]
    return Bitmap(bits)


def save_pbm(b: Bitmap) -> bytes:
    """Serialize as P4: MSB-first bits, rows zero-padded to a byte boundary."""
    packed = np.packbits(b.pixels, axis=1, bitorder="big")
    return f"P4\n{b.width} {b.height}\n".encode("ascii") + packed.tobytes()


def save_pbm_ascii(b: Bitmap) -> bytes:
    lines = [f"P1\n{b.width} {b.height}"]
    lines.extend(" ".join(str(v) for v in row) for row in b.pixels)
    return ("\n".join(lines) + "\n").encode("ascii")


def binarize(gray, width: int, height: int, threshold: int = 128) -> Bitmap:
    """Dark-on-light thresholding: a pixel is ink iff its intensity < threshold."""
    arr = np.asarray(gray)
    if arr.size != width * height:
        raise DimensionMismatchError(f"{arr.size} intensities for a {width}x{height} image")
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must lie in 0..255")
    return Bitmap((arr.reshape(height, width) < threshold).astype(np.uint8))


def packed_size(b: Bitmap) -> int:
    """Bytes needed for the raw 1-bpp raster, ceil(width * height / 8)."""
    return (b.width * b.height + 7) // 8
