"""The full bitmap-to-model pipeline and back."""

from __future__ import annotations

from .graph import build_graph
from .minimizer import MinimizedGraph, minimize
from .raster import Bitmap
from .render import rasterize_skeleton, thicken
from .smoothing import SmoothingParams, smooth
from .thinning import thin


def model_from_bitmap(b: Bitmap, params: SmoothingParams = SmoothingParams()) -> MinimizedGraph:
    """Thin, trace, smooth and minimize a binary image."""
    return minimize(smooth(build_graph(thin(b)), params))


def bitmap_from_model(m: MinimizedGraph, width: float | None = None) -> Bitmap:
    """Rasterize the skeleton and thicken it to ``width`` (default: the stored line width)."""
    w = m.avg_line_width if width is None else width
    return thicken(rasterize_skeleton(m), max(1.0, w))
