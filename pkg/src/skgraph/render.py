"""Image reproduction: skeleton rasterization and stroke thickening."""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage as ndi

from .raster import Bitmap
from .synthetic import disc


def rasterize_skeleton(m) -> Bitmap:
    """Bitmap holding every anchor and every pixel visited by a branch walk.

    Raises OutOfBoundsWalkError when a walk leaves the declared canvas.
    """
    return m.render()


def thicken_radius(width: float) -> float:
    """Disc radius (width - 1) / 2, rounded half-up to the nearest half pixel."""
    return math.floor((width - 1) + 0.5) / 2


def thicken(skel: Bitmap, width: float) -> Bitmap:
    """Dilate ``skel`` by a disc so strokes come out about ``width`` pixels wide."""
    if not width >= 1:
        raise ValueError("width must be >= 1")
    r = thicken_radius(width)
    if r < 1:
        return skel
    grown = ndi.binary_dilation(skel.pixels.astype(bool), disc(r))
    return Bitmap(grown.astype(np.uint8), skel.dpi)
