"""Compact graph models of line images such as handwriting and signatures.

A binary image is thinned to a one-pixel skeleton, traced into a graph of
nodes and chain-coded branches, smoothed, reduced to a minimal set of anchor
points and serialized as a small SKG1 container.  The same model yields a
20-value structural feature vector for k-nearest-neighbour classification.
"""

from .codec import decode, decode_with_info, encode
from .errors import SkgError
from .features import FeatureVector, KnnClassifier, extract_features, knn_classify, loop_count
from .graph import Branch, ContourGraph, Node, build_graph
from .minimizer import MinimizedGraph, minimize, verify_counts
from .pipeline import bitmap_from_model, model_from_bitmap
from .raster import Bitmap, load_pbm, packed_size, save_pbm
from .render import rasterize_skeleton, thicken
from .smoothing import SmoothingParams, smooth
from .thinning import Skeleton, thin

__all__ = [
    "Bitmap", "Branch", "ContourGraph", "FeatureVector", "KnnClassifier", "MinimizedGraph",
    "Node", "Skeleton", "SkgError", "SmoothingParams", "bitmap_from_model", "build_graph",
    "decode", "decode_with_info", "encode", "extract_features", "knn_classify", "load_pbm",
    "loop_count", "minimize", "model_from_bitmap", "packed_size", "rasterize_skeleton",
    "save_pbm", "smooth", "thicken", "thin", "verify_counts",
]
