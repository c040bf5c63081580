"""Safe-point thinning (SPTA) and stroke width measurement.

Neighbour numbering follows the Freeman directions used everywhere in the
package, counter-clockwise from East with rows growing downwards::

    3 2 1
    4 p 0
    5 6 7

A pixel whose West neighbour is background is a *left edge point*.  It is
deletable (not a safe point) when

    n0 & (n1 | n2 | n6 | n7) & (n2 | ~n3) & (n6 | ~n5)

The other three edge types use the same test with the neighbourhood rotated.
Each iteration runs four parallel sub-passes in the order N, S, E, W and the
image is iterated to a fixed point.

No topology-preserving deletion can remove a 2x2 block whose four corners
each carry a diagonal arm (a thick four-way junction).  Such blocks are
rewired instead: one corner is dropped and a pixel of the original ink that
reconnects its arm is restored, keeping the result inside the source.

Finally, one-pixel bumps are flattened: a line pixel whose two neighbours sit
two apart on a row (or column) next to it is moved onto that row when the
pixel between them was ink in the source.  This removes a 90 degree
zig-zag from the chain code without changing the topology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi

from .raster import Bitmap

# (d_row, d_col) for Freeman direction k
OFFSETS = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))

# edge neighbour (the background one) for the N, S, E, W sub-passes
_PASS_ORDER = (2, 6, 0, 4)


@dataclass(frozen=True)
class Skeleton:
    grid: Bitmap
    avg_line_width: float


def neighbours(mask: np.ndarray) -> list[np.ndarray]:
    """The eight shifted copies of ``mask``; pixels beyond the border are 0."""
    p = np.pad(mask, 1)
    h, w = mask.shape
    return [p[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w] for dr, dc in OFFSETS]


def _deletable(n: list[np.ndarray], edge: int) -> np.ndarray:
    # rotate the left-edge (edge == 4) expression onto the requested edge
    r = [n[(i + edge - 4) % 8] for i in range(8)]
    return ~r[4] & r[0] & (r[1] | r[2] | r[6] | r[7]) & (r[2] | ~r[3]) & (r[6] | ~r[5])


def _sweep(img: np.ndarray) -> np.ndarray:
    while True:
        removed = 0
        for edge in _PASS_ORDER:
            kill = img & _deletable(neighbours(img), edge)
            k = int(kill.sum())
            if k:
                img &= ~kill
                removed += k
        if not removed:
            return img


_EIGHT = np.ones((3, 3), dtype=bool)


def _topology(img: np.ndarray) -> tuple[int, int]:
    """(8-connected components, 4-connected background components)."""
    return ndi.label(img, _EIGHT)[1], ndi.label(~np.pad(img, 1))[1]


def blocks(img: np.ndarray) -> np.ndarray:
    """Top-left corners of fully inked 2x2 blocks."""
    return np.argwhere(img[:-1, :-1] & img[1:, :-1] & img[:-1, 1:] & img[1:, 1:])


def _rewire_block(img, source, r, c, topo):
    h, w = img.shape
    for pr, pc in ((r, c), (r, c + 1), (r + 1, c + 1), (r + 1, c)):
        for dr, dc in OFFSETS:
            qr, qc = pr + dr, pc + dc
            if not (0 <= qr < h and 0 <= qc < w) or img[qr, qc] or not source[qr, qc]:
                continue
            trial = img.copy()
            trial[pr, pc] = False
            trial[qr, qc] = True
            win = trial[max(0, qr - 1) : qr + 2, max(0, qc - 1) : qc + 2]
            if len(blocks(win)) or _topology(trial) != topo:
                continue
            return trial
    return None


def _flatten_bumps(img: np.ndarray, source: np.ndarray) -> int:
    """Move bump pixels onto the line they stick out of; returns the move count."""
    h, w = img.shape
    n = neighbours(img)
    count = sum(k.astype(np.int8) for k in n)
    moved = 0
    for r, c in np.argwhere(img & (count == 2)):
        if not img[r, c]:
            continue
        nb = [(r + dr, c + dc) for dr, dc in OFFSETS if 0 <= r + dr < h and 0 <= c + dc < w and img[r + dr, c + dc]]
        if len(nb) != 2:
            continue
        (ar, ac), (br, bc) = nb
        if {abs(ar - br), abs(ac - bc)} != {0, 2} or (ar + br) % 2 or (ac + bc) % 2:
            continue
        qr, qc = (ar + br) // 2, (ac + bc) // 2
        if (qr, qc) == (r, c) or img[qr, qc] or not source[qr, qc]:
            continue
        img[r, c] = False
        win = img[max(0, qr - 1) : qr + 2, max(0, qc - 1) : qc + 2]
        if int(win.sum()) != 2:
            img[r, c] = True
            continue
        img[qr, qc] = True
        moved += 1
    return moved


def thin_mask(mask: np.ndarray) -> np.ndarray:
    source = np.asarray(mask, dtype=bool)
    img = _sweep(source.copy())
    for _ in range(8):
        found = blocks(img)
        if not len(found):
            break
        topo = _topology(img)
        changed = False
        for r, c in found:
            if not img[r : r + 2, c : c + 2].all():
                continue
            trial = _rewire_block(img, source, r, c, topo)
            if trial is not None:
                img = trial
                changed = True
        if not changed:
            break
        img = _sweep(img)
    for _ in range(8):
        if not _flatten_bumps(img, source):
            break
        img = _sweep(img)
    return img


def measure_line_width(source: Bitmap, skel: Bitmap) -> float:
    """Ink area of ``source`` divided by the pixel count of ``skel``."""
    n_skel = skel.count()
    if n_skel == 0:
        return 1.0
    return source.count() / n_skel


def thin(b: Bitmap) -> Skeleton:
    grid = Bitmap(thin_mask(b.pixels.astype(bool)).astype(np.uint8), b.dpi)
    return Skeleton(grid, measure_line_width(b, grid))
