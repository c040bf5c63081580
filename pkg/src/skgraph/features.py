"""Structural features of a graph model and a k-nearest-neighbour classifier.

Features are read off the planar step graph of the model: every chain step
is an edge between two pixels, and two diagonal steps that cross between
pixels meet at an extra vertex.  Pixels of degree other than two are nodes;
short spurs are pruned and junction nodes joined by a short segment count
as one junction, which keeps counts stable when rasterization adds a spur
at a corner or splits a junction in two.

Geometry is measured in a frame fixed to the skeleton (see ``shape_frame``),
so rotating the source image moves few values.  Lengths and boxes are padded
by half the line width at free stroke ends, which thinning trims.

Layout of the 20 values::

    f0  endpoints              f10 mean chord / arc over segments
    f1  junctions              f11 enclosed area / box area
    f2  loops (cycle rank)     f12 min node distance / diagonal
    f3  segments               f13 max node distance / diagonal
    f4  longest / total length f14 mean node distance / diagonal
    f5  total length / diag    f15 std of node distances / diagonal
    f6  centroid dx / diag     f16 mean net turn per step (45 degree units)
    f7  centroid dy / diag     f17 mean absolute net turn per step
    f8  box aspect min/max     f18 endpoint to centroid mean / diagonal
    f9  straight segments      f19 junction to centroid mean / diagonal
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi
from scipy.spatial import ConvexHull, QhullError

from .errors import EmptyTrainingError

N_FEATURES = 20
COUNT_SLOTS = (0, 1, 2, 3, 9)
STRAIGHT = 0.95
ELONGATED = 0.6  # principal variance ratio below which the principal axis sets the frame
ISOTROPIC = 0.9  # boxes closer to square than this keep the near-image orientation


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} values, got {len(self.values)}")

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __str__(self):
        return ",".join(f"{v:.6g}" for v in self.values)


# --- topology -----------------------------------------------------------


def step_graph(m) -> tuple[set, dict]:
    """Vertices and adjacency of the planar step graph of a model."""
    edges = set()
    verts = {a.xy for a in m._node_list()}
    for p in m.paths():
        verts.update(p)
        for a, b in zip(p, p[1:]):
            if a != b:
                edges.add((min(a, b), max(a, b)))
    # two diagonals crossing inside a pixel square meet at its centre
    for a, b in list(edges):
        if b[0] - a[0] == 1 and b[1] - a[1] == 1:
            other = ((a[0], a[1] + 1), (a[0] + 1, a[1]))
            if other in edges:
                mid = (a[0] + 0.5, a[1] + 0.5)
                edges -= {(a, b), other}
                edges |= {(a, mid), (mid, b), (other[0], mid), (mid, other[1])}
                verts.add(mid)
    adj = {v: [] for v in verts}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return verts, adj


def _step_len(a, b) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


@dataclass(frozen=True)
class Topology:
    """Nodes are junction clusters, endpoints and loop starts; segments join them."""

    nodes: tuple            # representative pixel per node
    degree: tuple           # segment ends at each node
    segments: tuple         # (node a, node b, pixel path)
    components: int
    absorbed: float = 0.0   # length of the segments folded into junction clusters


def _segments(verts, adj):
    """Split the step graph into node-to-node pixel runs and free rings."""
    ends = {v for v in verts if len(adj[v]) != 2}
    seen = set()
    segs = []

    def run(v, w):
        path = [v, w]
        while path[-1] not in ends and path[-1] != v:
            a, b = adj[path[-1]]
            path.append(b if a == path[-2] else a)
        return path

    for v in sorted(ends, key=_order):
        for w in sorted(adj[v], key=_order):
            if (v, w) in seen:
                continue
            path = run(v, w)
            seen.add((path[0], path[1]))
            seen.add((path[-1], path[-2]))
            segs.append(path)
    done = set().union(*segs) if segs else set()
    for v in sorted(verts - done, key=_order):
        if v in done or v in ends:
            continue
        path = run(v, min(adj[v], key=_order))
        done.update(path)
        ends.add(v)
        segs.append(path)
    return ends, segs


def _length(path) -> float:
    return sum(map(_step_len, path, path[1:]))


def topology(m, spur: float | None = None, merge: float | None = None) -> Topology:
    """Contract the step graph to nodes and segments.

    Spurs (endpoint to junction) no longer than ``spur`` are pruned once.
    Junction nodes linked by a segment no longer than ``merge`` become one
    node and that segment is dropped, as are rings shorter than ``2 * merge``
    that start and end at one node.  Both radii default to 1.5 line widths.
    """
    w = max(1.0, float(m.avg_line_width))
    spur = 1.5 * w if spur is None else spur
    merge = 1.5 * w if merge is None else merge
    verts, adj = step_graph(m)
    ends, segs = _segments(verts, adj)
    if spur > 0:
        cut = set()
        for p in segs:
            if _length(p) <= spur + 1e-9:
                da, db = len(adj[p[0]]), len(adj[p[-1]])
                if da == 1 and db >= 3:
                    cut.update(p[:-1])
                elif db == 1 and da >= 3:
                    cut.update(p[1:])
        if cut:
            verts = verts - cut
            adj = {v: [u for u in adj[v] if u not in cut] for v in verts}
            ends, segs = _segments(verts, adj)

    parent = {v: v for v in ends}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    junction = {v for v in ends if len(adj[v]) >= 3}
    drop = set()
    for i, p in enumerate(segs):
        if p[0] in junction and p[-1] in junction and p[0] != p[-1] and _length(p) <= merge + 1e-9:
            drop.add(i)
            a, b = find(p[0]), find(p[-1])
            if a != b:
                parent[max(a, b, key=_order)] = min(a, b, key=_order)
    for i, p in enumerate(segs):
        if i not in drop and len(adj[p[0]]) >= 3 and find(p[0]) == find(p[-1]) and _length(p) <= 2 * merge + 1e-9:
            drop.add(i)

    roots = sorted({find(v) for v in ends}, key=_order)
    rid = {r: i for i, r in enumerate(roots)}
    deg = [0] * len(roots)
    out = []
    link = list(range(len(roots)))

    def top(i):
        while link[i] != i:
            link[i] = link[link[i]]
            i = link[i]
        return i

    for i, p in enumerate(segs):
        if i in drop:
            continue
        a, b = rid[find(p[0])], rid[find(p[-1])]
        deg[a] += 1
        deg[b] += 1
        out.append((a, b, tuple(p)))
        link[top(a)] = top(b)
    comps = len({top(i) for i in range(len(roots))})
    absorbed = sum(_length(segs[i]) for i in drop)
    return Topology(tuple(roots), tuple(deg), tuple(out), comps, absorbed)


def _chain_count(t: Topology) -> int:
    """Segments once every pass-through (degree-2) node is dissolved."""
    link = list(range(len(t.nodes)))

    def top(i):
        while link[i] != i:
            link[i] = link[link[i]]
            i = link[i]
        return i

    for a, b, _ in t.segments:
        link[top(a)] = top(b)
    plain = defaultdict(lambda: True)
    for i, d in enumerate(t.degree):
        if d != 2:
            plain[top(i)] = False
    rings = sum(1 for i in range(len(t.nodes)) if top(i) == i and plain[i] and t.degree[i] == 2)
    return len(t.segments) - sum(d == 2 for d in t.degree) + rings


def _order(v):
    return (v[1], v[0])


def loop_count(m, spur: float | None = None, merge: float | None = None) -> int:
    """Cycle rank B - N + C of the contracted step graph (see ``topology``).

    With ``spur=0`` and ``merge=0`` this is the cycle rank of the raw step graph.
    """
    t = topology(m, spur, merge)
    return len(t.segments) - len(t.nodes) + t.components


# --- geometry -----------------------------------------------------------


def shape_frame(points: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """2x2 rotation taking image (x, y) to a frame fixed to the shape.

    Elongated shapes use their major principal axis, pointing up.  Others
    use the minimum-area bounding box, long side up, or turned by at most
    45 degrees from the image axes when the box is nearly square.
    """
    if len(points) < 3:
        return np.eye(2)
    vals, vecs = np.linalg.eigh(np.cov(points.T, aweights=weights))
    if vals[1] > 0 and vals[0] / vals[1] < ELONGATED:
        up = vecs[:, 1] if vecs[1, 1] <= 0 else -vecs[:, 1]
        return _rotation(math.atan2(-up[0], -up[1]))
    angle = -_box_angle(points)
    rot = _rotation(angle)
    ext = np.ptp(points @ rot.T, axis=0)
    if ext[0] > ext[1] and ext[1] / ext[0] < ISOTROPIC:
        # make the long side vertical, turning the short way round
        angle += math.pi / 2 if angle <= 0 else -math.pi / 2
        rot = _rotation(angle)
    return rot


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _box_angle(points: np.ndarray) -> float:
    """Orientation of the minimum-area rectangle, in (-45, 45] degrees."""
    corners = (points[:, None, :] + np.array([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])).reshape(-1, 2)
    try:
        hull = corners[ConvexHull(corners).vertices]
    except QhullError:
        return 0.0
    best = (math.inf, 0.0)
    edges = np.diff(np.vstack([hull, hull[:1]]), axis=0)
    for ex, ey in edges:
        a = math.atan2(ey, ex)
        a = (a + math.pi / 4) % (math.pi / 2) - math.pi / 4
        c, s = math.cos(a), math.sin(a)
        r = hull @ np.array([[c, s], [-s, c]]).T
        area = float(np.prod(r.max(axis=0) - r.min(axis=0)))
        key = (round(area, 6), abs(a))
        if key < (round(best[0], 6), abs(best[1])):
            best = (area, a)
    return best[1]


def _net_turn(path) -> int:
    dirs = [math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in zip(path, path[1:])]
    total = 0.0
    for d1, d2 in zip(dirs, dirs[1:]):
        total += (d2 - d1 + math.pi) % (2 * math.pi) - math.pi
    # counter-clockwise on screen is positive, in 45 degree units
    return -total / (math.pi / 4)


def _shoelace(p) -> float:
    """Signed area of a closed pixel path, positive when counter-clockwise on screen."""
    return -0.5 * sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(p, p[1:]))


def _enclosed_area(m) -> int:
    pix = m.pixel_set()
    if not pix:
        return 0
    xs = [p[0] for p in pix]
    ys = [p[1] for p in pix]
    x0, y0 = min(xs), min(ys)
    grid = np.zeros((max(ys) - y0 + 3, max(xs) - x0 + 3), dtype=bool)
    for x, y in pix:
        grid[y - y0 + 1, x - x0 + 1] = True
    filled = ndi.binary_fill_holes(grid)
    return int(filled.sum() - grid.sum())


def extract_features(m) -> FeatureVector:
    """The 20 structural features of a (minimized) graph model."""
    if not m.pixel_set():
        return FeatureVector((0.0,) * N_FEATURES)
    t = topology(m)
    deg = np.array(t.degree)
    n_end = int(np.sum(deg == 1))
    n_junction = int(np.sum(deg >= 3))
    n_loops = len(t.segments) - len(t.nodes) + t.components
    n_segments = _chain_count(t)

    # strokes reach half a pen width past the skeleton, which thinning removes
    pad = max(0.5, float(m.avg_line_width) / 2)
    kept = {q for _, _, p in t.segments for q in p} | set(t.nodes)
    pts = np.array(sorted(kept, key=_order), dtype=float)
    centre = pts.mean(axis=0)
    # step midpoints weighted by step length sample the curve evenly
    mids = np.array([((a[0] + b[0]) / 2, (a[1] + b[1]) / 2) for _, _, p in t.segments for a, b in zip(p, p[1:])])
    if len(mids) >= 3:
        wts = np.array([_step_len(a, b) for _, _, p in t.segments for a, b in zip(p, p[1:])])
        rot = shape_frame(mids, wts)
    else:
        rot = shape_frame(pts)
    local = (pts - centre) @ rot.T
    lo, hi = local.min(axis=0) - pad, local.max(axis=0) + pad
    size = hi - lo
    diag = float(math.hypot(*size))
    box_centre = (lo + hi) / 2

    lengths = [
        _length(p) + pad * ((deg[a] == 1) + (deg[b] == 1)) for a, b, p in t.segments
    ]
    # a junction cluster is crossed once, so count half of its short routes
    total = float(sum(lengths) + t.absorbed / 2) or 1.0
    chords = []
    turns = []
    for (na, nb, p), arc in zip(t.segments, lengths):
        chords.append(min(1.0, _step_len(p[0], p[-1]) / _length(p)) if _length(p) else 0.0)
        # read open segments downwards in the frame and closed ones
        # counter-clockwise, so the sign of the net turn is stable
        if na == nb:
            q = p if _shoelace(p) >= 0 else p[::-1]
        else:
            a, b = (np.array(p[0]) - centre) @ rot.T, (np.array(p[-1]) - centre) @ rot.T
            q = p if (a[1], a[0]) <= (b[1], b[0]) else p[::-1]
        turns.append(_net_turn(q) / max(arc, 1.0))

    node_xy = np.array([n for n, d in zip(t.nodes, t.degree) if d != 2], dtype=float).reshape(-1, 2)
    deg = deg[deg != 2]
    dists = []
    for i in range(len(node_xy)):
        for j in range(i + 1, len(node_xy)):
            dists.append(float(np.hypot(*(node_xy[i] - node_xy[j]))))
    d = np.array(dists) / diag if dists else np.zeros(1)

    def to_centre(sel):
        q = node_xy[sel]
        return float(np.mean(np.hypot(*(q - centre).T))) / diag if len(q) else 0.0

    values = [
        n_end,
        n_junction,
        n_loops,
        n_segments,
        max(lengths, default=0.0) / total,
        total / diag,
        -box_centre[0] / diag,
        -box_centre[1] / diag,
        min(size) / max(size),
        sum(c >= STRAIGHT for c in chords),
        float(np.mean(chords)) if chords else 0.0,
        _enclosed_area(m) / float(size[0] * size[1]),
        float(d.min()),
        float(d.max()),
        float(d.mean()),
        float(d.std()),
        float(np.mean(turns)) if turns else 0.0,
        float(np.mean(np.abs(turns))) if turns else 0.0,
        to_centre(deg == 1),
        to_centre(deg >= 3),
    ]
    return FeatureVector(tuple(float(v) for v in values))


# --- classification -----------------------------------------------------


def _zscore(train: np.ndarray):
    mu = train.mean(axis=0)
    sd = train.std(axis=0)
    sd[sd == 0] = 1.0
    return mu, sd


def knn_classify(v, training, k: int = 5):
    """Majority label of the k nearest training vectors.

    Distances are Euclidean after z-scoring each dimension with training
    statistics.  Ties go to the label with the smaller mean distance, then
    to the smaller label.
    """
    if not training:
        raise EmptyTrainingError("training set is empty")
    if not 1 <= k <= len(training):
        raise ValueError(f"k must be in 1..{len(training)}")
    x = np.array([_values(f) for f, _ in training])
    labels = [lab for _, lab in training]
    mu, sd = _zscore(x)
    return _vote((x - mu) / sd, labels, (np.asarray(_values(v)) - mu) / sd, k)


def _values(f):
    return f.values if isinstance(f, FeatureVector) else tuple(f)


def _vote(z, labels, probe, k):
    dist = np.sqrt(((z - probe) ** 2).sum(axis=1))
    near = np.argsort(dist, kind="stable")[:k]
    votes = Counter(labels[i] for i in near)
    spread = defaultdict(list)
    for i in near:
        spread[labels[i]].append(dist[i])
    return min(votes, key=lambda lab: (-votes[lab], float(np.mean(spread[lab])), lab))


class KnnClassifier:
    """k-NN over z-scored features with statistics fixed at construction."""

    def __init__(self, training, k: int = 5):
        if not training:
            raise EmptyTrainingError("training set is empty")
        if not 1 <= k <= len(training):
            raise ValueError(f"k must be in 1..{len(training)}")
        x = np.array([_values(f) for f, _ in training])
        self.labels = [lab for _, lab in training]
        self.mu, self.sd = _zscore(x)
        self.z = (x - self.mu) / self.sd
        self.k = k

    def predict(self, v):
        return _vote(self.z, self.labels, (np.asarray(_values(v)) - self.mu) / self.sd, self.k)
