"""Node/branch graph of a one-pixel-wide skeleton.

Coordinates are ``(x, y)`` = (column, row).  Freeman directions count
counter-clockwise from East in 45 degree steps with rows growing downwards:
0=E, 1=NE, 2=N, 3=NW, 4=W, 5=SW, 6=S, 7=SE.

A branch is stored as its start node plus the chain of directions; a loop
branch ends where it starts (``end_node == start_node``).
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import BackgroundPixelError, NotThinnedError, OutOfBoundsWalkError
from .raster import Bitmap
from .thinning import Skeleton, blocks

FREEMAN = ((1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1))
DIRECTION = {step: k for k, step in enumerate(FREEMAN)}

Pixel = tuple[int, int]


@dataclass(frozen=True)
class Node:
    id: int
    x: int
    y: int
    index: int
    branch_refs: tuple[int, ...] = ()

    @property
    def xy(self) -> Pixel:
        return (self.x, self.y)


@dataclass(frozen=True)
class Branch:
    id: int
    start_node: int
    chain: tuple[int, ...]
    end_node: int | None

    @property
    def is_loop(self) -> bool:
        return self.end_node == self.start_node

    def __len__(self):
        return len(self.chain)


def walk(start: Pixel, chain) -> list[Pixel]:
    """Pixels visited by ``chain`` from ``start``, both ends included."""
    x, y = start
    out = [(x, y)]
    for d in chain:
        dx, dy = FREEMAN[d]
        x += dx
        y += dy
        out.append((x, y))
    return out


def chain_of(path) -> tuple[int, ...]:
    try:
        return tuple(DIRECTION[(b[0] - a[0], b[1] - a[1])] for a, b in zip(path, path[1:]))
    except KeyError:
        raise ValueError("consecutive path pixels are not 8-adjacent") from None


class _GraphBase:
    """Shared helpers for graphs made of anchored chains."""

    def _node_list(self):
        raise NotImplementedError

    def paths(self) -> list[list[Pixel]]:
        nodes = self._node_list()
        return [walk(nodes[b.start_node].xy, b.chain) for b in self.branches]

    def pixel_set(self) -> set[Pixel]:
        pix = {n.xy for n in self._node_list()}
        for p in self.paths():
            pix.update(p)
        return pix

    def render(self) -> Bitmap:
        grid = np.zeros((self.height, self.width), dtype=np.uint8)
        for x, y in self.pixel_set():
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise OutOfBoundsWalkError(f"pixel ({x}, {y}) outside {self.width}x{self.height}")
            grid[y, x] = 1
        return Bitmap(grid)

    def total_length(self) -> int:
        return sum(len(b.chain) for b in self.branches)


@dataclass(frozen=True)
class ContourGraph(_GraphBase):
    """Skeleton graph.  Node ids equal list positions; nodes are ordered by (y, x).

    ``Node.index`` is the number of branch ends at the node.  Loop-start nodes
    created for closed contours without any junction or endpoint have index 2
    and are counted in ``n_loops``; isolated pixels are nodes of index 0.
    """

    nodes: tuple[Node, ...]
    branches: tuple[Branch, ...]
    n_loops: int
    width: int
    height: int
    avg_line_width: float = 1.0

    def _node_list(self):
        return self.nodes

    def index_counts(self) -> Counter:
        return Counter(n.index for n in self.nodes)


def pixel_index(grid: Bitmap, x: int, y: int) -> int:
    """Number of ink pixels in the 3x3 window around (x, y), centre excluded."""
    px = grid.pixels
    if not (0 <= x < grid.width and 0 <= y < grid.height) or not px[y, x]:
        raise BackgroundPixelError(f"({x}, {y}) is not an ink pixel")
    win = px[max(0, y - 1) : y + 2, max(0, x - 1) : x + 2]
    return int(win.sum()) - 1


def index_map(mask: np.ndarray) -> np.ndarray:
    """Pixel index of every pixel (meaningful on ink pixels only)."""
    m = mask.astype(np.int8)
    p = np.pad(m, 1)
    h, w = m.shape
    total = sum(p[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w] for dx, dy in FREEMAN)
    return total * m


# --- canonical assembly -------------------------------------------------


def _yx(p: Pixel):
    return (p[1], p[0])


def _canonical_loop(cycle: list[Pixel], avoid=frozenset()) -> list[Pixel]:
    """Rotate/orient a closed path (first == last) to its canonical form:
    start at the smallest (y, x) pixel not in ``avoid``, direction with the
    smaller chain."""
    ring = cycle[:-1]
    n = len(ring)
    free = [p for p in ring if p not in avoid] or ring
    low = min(free, key=_yx)
    best = None
    for i, p in enumerate(ring):
        if p != low:
            continue
        fwd = ring[i:] + ring[:i]
        rev = [fwd[0]] + fwd[:0:-1]
        for cand in (fwd, rev):
            key = chain_of(cand + [cand[0]])
            if best is None or key < best[0]:
                best = (key, cand + [cand[0]])
    assert best is not None and len(best[1]) == n + 1
    return best[1]


def _orient(path: list[Pixel]) -> list[Pixel]:
    a, b = path[0], path[-1]
    if a != b:
        return path if _yx(a) < _yx(b) else path[::-1]
    rev = path[::-1]
    return path if chain_of(path) <= chain_of(rev) else rev


def end_degrees(paths) -> Counter:
    deg = Counter()
    for p in paths:
        deg[p[0]] += 1
        deg[p[-1]] += 1
    return deg


def assemble(paths, dots, width, height, avg_line_width=1.0) -> ContourGraph:
    """Build a canonical ContourGraph from vertex-to-vertex pixel paths.

    Vertices are the path end pixels plus ``dots``.  A closed path whose end
    pixel carries no other path is a free loop and is re-anchored canonically.
    """
    paths = [[(int(x), int(y)) for x, y in p] for p in paths]
    dots = [(int(x), int(y)) for x, y in dots]
    deg = end_degrees(paths)
    fixed = []
    loops = []
    for p in paths:
        if p[0] == p[-1] and deg[p[0]] == 2:
            loops.append(p)
        else:
            fixed.append(_orient(p))
    # free loops that share pixels must not pick the same anchor, so they
    # are placed in an order that does not depend on how they were given
    taken = set(end_degrees(fixed))
    for p in sorted(loops, key=lambda p: sorted(map(_yx, p[:-1]))):
        q = _canonical_loop(p, taken | (deg.keys() - {p[0]}))
        taken.add(q[0])
        fixed.append(q)
    n_loops = len(loops)
    deg = end_degrees(fixed)
    verts = sorted(set(deg) | set(dots), key=_yx)
    vid = {v: i for i, v in enumerate(verts)}
    keyed = sorted(((vid[p[0]], chain_of(p)), p) for p in fixed)
    branches = []
    refs = {i: [] for i in range(len(verts))}
    for bid, ((sid, chain), p) in enumerate(keyed):
        branches.append(Branch(bid, sid, chain, vid[p[-1]]))
        refs[sid].append(bid)
    nodes = tuple(Node(i, v[0], v[1], deg.get(v, 0), tuple(refs[i])) for i, v in enumerate(verts))
    return ContourGraph(nodes, tuple(branches), n_loops, width, height, avg_line_width)


# --- tracing ------------------------------------------------------------


def build_graph(skel: Skeleton) -> ContourGraph:
    """Trace every branch of a thinned skeleton.

    Nodes are ink pixels whose index is not 2; every 8-adjacency step between
    ink pixels belongs to exactly one branch.  Closed contours made only of
    index-2 pixels get a loop-start node at their smallest (y, x) pixel.
    """
    grid = skel.grid
    mask = grid.pixels.astype(bool)
    h, w = mask.shape
    if len(blocks(mask)):
        r, c = blocks(mask)[0]
        raise NotThinnedError(f"2x2 ink block at ({c}, {r})")
    idx = index_map(mask)
    if (idx > 4).any():
        r, c = np.argwhere(idx > 4)[0]
        warnings.warn(f"pixel ({c}, {r}) has index {idx[r, c]}; treated as a node", stacklevel=2)

    W = w + 2
    ink = bytearray(np.pad(mask, 1).astype(np.uint8).tobytes())
    node = bytearray(np.pad(mask & (idx != 2), 1).astype(np.uint8).tobytes())
    offs = [dx + dy * W for dx, dy in FREEMAN]

    def xy(i):
        return (i % W - 1, i // W - 1)

    used = set()
    visited = bytearray(len(ink))
    paths = []

    def trace(start, first):
        path = [start]
        prev, cur = start, first
        used.add((min(prev, cur), max(prev, cur)))
        while not node[cur]:
            visited[cur] = 1
            path.append(cur)
            nxt = next(cur + o for o in offs if ink[cur + o] and cur + o != prev)
            used.add((min(cur, nxt), max(cur, nxt)))
            if nxt == start and not node[start]:
                break
            prev, cur = cur, nxt
        path.append(nxt if not node[cur] else cur)
        paths.append([xy(i) for i in path])

    node_pix = [(r + 1) * W + c + 1 for r, c in np.argwhere(mask & (idx != 2))]
    for s in node_pix:
        for o in offs:
            n = s + o
            if ink[n] and (min(s, n), max(s, n)) not in used:
                trace(s, n)

    for r, c in np.argwhere(mask & (idx == 2)):
        s = (r + 1) * W + c + 1
        if visited[s]:
            continue
        visited[s] = 1
        first = next(s + o for o in offs if ink[s + o])
        trace(s, first)

    dots = [(int(c), int(r)) for r, c in np.argwhere(mask & (idx == 0))]
    return assemble(paths, dots, w, h, skel.avg_line_width)


def dump_graph(g) -> str:
    """Text dump: ``N id x y index`` lines then ``B id start end|loop chain`` lines."""
    nodes = g._node_list()
    lines = [f"N {n.id} {n.x} {n.y} {n.index}" for n in nodes]
    for b in g.branches:
        end = "loop" if b.is_loop else ("-" if b.end_node is None else str(b.end_node))
        lines.append(f"B {b.id} {b.start_node} {end} {''.join(map(str, b.chain))}")
    return "\n".join(lines) + "\n"
