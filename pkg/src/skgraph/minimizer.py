"""Graph minimization: concatenate branches through nodes to keep few anchors.

The trace follows four steps.  Junctions (index 3) are taken in (y, x) order;
each one that still has uncovered branches becomes an anchor and every such
branch is traced.  A trace that enters an uncovered junction carries on along
the uncovered exit with the smallest turn and leaves that junction available
for later selection; it stops at a covered node, an endpoint, or a junction
with nothing left to follow.  Endpoints (index 1) with uncovered branches are
then handled the same way, followed by free loops and isolated dots.

Branch counts obey B = (N1 + 3 N3) / 2 + N_loops both before and after
minimization, where N1 and N3 count path-end vertices of degree 1 and 3.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import asdict, dataclass

from .errors import ParityError, UnsmoothedInputError
from .graph import Branch, ContourGraph, Node, _GraphBase, chain_of
from .smoothing import turn_cost

_HEADING_STEPS = 5


@dataclass(frozen=True)
class MinimizedGraph(_GraphBase):
    """Anchors (retained nodes, ids = positions, sorted by (y, x)) and their branches.

    ``Branch.end_node`` is the anchor id of the final pixel, or ``None`` when
    the trace ended on a node that is not an anchor.
    """

    anchors: tuple[Node, ...]
    branches: tuple[Branch, ...]
    n_loops: int
    width: int
    height: int
    avg_line_width: float = 1.0

    def _node_list(self):
        return self.anchors


def branch_count(n1: int, n3: int, n_loops: int) -> int:
    """Branches of a graph with n1 endpoints, n3 junctions and n_loops free loops."""
    if (n1 + 3 * n3) % 2:
        raise ParityError(f"n1 + 3*n3 = {n1 + 3 * n3} is odd")
    return (n1 + 3 * n3) // 2 + n_loops


def _ends(g: ContourGraph):
    out = defaultdict(list)
    for b in g.branches:
        out[b.start_node].append((b.id, 0))
        out[b.end_node].append((b.id, 1))
    return out


def minimize(g: ContourGraph) -> MinimizedGraph:
    """Concatenate branches of a smoothed graph so only a minimal anchor set starts them."""
    heavy = [n for n in g.nodes if n.index >= 4]
    if heavy:
        n = heavy[0]
        raise UnsmoothedInputError(f"node at ({n.x}, {n.y}) has index {n.index}; smooth the graph first")
    paths = g.paths()
    ends = _ends(g)
    node_at = {n.xy: n.id for n in g.nodes}
    used = set()
    covered = set()
    traces = []  # (anchor node id, pixel path)

    def oriented(bid, side):
        p = paths[bid]
        return p if side == 0 else p[::-1]

    def trace(nid, end):
        pix = list(oriented(*end))
        used.add(end[0])
        while True:
            v = node_at[pix[-1]]
            node = g.nodes[v]
            if v in covered or node.index != 3:
                break
            exits = [e for e in ends[v] if e[0] not in used]
            if not exits:
                break
            k = min(_HEADING_STEPS, len(pix) - 1)
            back = (pix[-1 - k][0] - pix[-1][0], pix[-1 - k][1] - pix[-1][1])

            def cost(e):
                q = oriented(*e)
                q = q[min(_HEADING_STEPS, len(q) - 1)]
                return turn_cost(back, (q[0] - pix[-1][0], q[1] - pix[-1][1]))

            nxt = min(exits, key=cost)
            used.add(nxt[0])
            pix.extend(oriented(*nxt)[1:])
        traces.append((nid, pix))

    def select(n):
        open_ends = [e for e in ends[n.id] if e[0] not in used]
        if not open_ends:
            return
        covered.add(n.id)
        selected.append(n.id)
        for e in open_ends:
            if e[0] not in used:
                trace(n.id, e)

    selected = []
    for want in (3, 1, 2):
        for n in g.nodes:
            if n.index == want:
                select(n)
    for n in g.nodes:
        if n.index not in (1, 2, 3):
            select(n)
        if n.index == 0:
            selected.append(n.id)

    keep = sorted(set(selected), key=lambda i: (g.nodes[i].y, g.nodes[i].x))
    aid = {nid: k for k, nid in enumerate(keep)}
    at = {g.nodes[nid].xy: aid[nid] for nid in keep}
    rows = sorted((aid[nid], chain_of(pix), at.get(pix[-1])) for nid, pix in traces)
    branches = tuple(Branch(i, s, c, e) for i, (s, c, e) in enumerate(rows))
    refs = defaultdict(list)
    for b in branches:
        refs[b.start_node].append(b.id)
    anchors = tuple(
        Node(k, g.nodes[nid].x, g.nodes[nid].y, g.nodes[nid].index, tuple(refs[k]))
        for k, nid in enumerate(keep)
    )
    return MinimizedGraph(anchors, branches, g.n_loops, g.width, g.height, quantize_width(g.avg_line_width))


def quantize_width(w: float) -> float:
    """Round a line width to the 1/256 pixel grid of the container."""
    return min(0xFFFF, round(w * 256)) / 256


@dataclass(frozen=True)
class CountReport:
    n1_min: int
    n3_min: int
    n_loops: int
    observed: int
    predicted: int
    anchors: int
    other_degrees: int

    @property
    def consistent(self) -> bool:
        return self.observed == self.predicted and self.other_degrees == 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["consistent"] = self.consistent
        return d


def end_degree_counts(g) -> Counter:
    """Histogram of vertex degrees, where a vertex is any branch end pixel."""
    deg = Counter()
    for p in g.paths():
        deg[p[0]] += 1
        deg[p[-1]] += 1
    return Counter(deg.values())


def verify_counts(g) -> CountReport:
    """Check B = (N1 + 3 N3) / 2 + N_loops on a minimized (or smoothed) graph.

    N1 and N3 count branch-end pixels of degree 1 and 3, so trace terminals
    that are not anchors are included.  Degree-2 pixels must be exactly the
    free loop starts; any other degree is reported in ``other_degrees``.
    """
    hist = end_degree_counts(g)
    n1, n3 = hist.get(1, 0), hist.get(3, 0)
    other = sum(c for d, c in hist.items() if d not in (1, 3)) - g.n_loops
    if (n1 + 3 * n3) % 2:
        predicted = -1
    else:
        predicted = branch_count(n1, n3, g.n_loops)
    anchors = len(g._node_list())
    return CountReport(n1, n3, g.n_loops, len(g.branches), predicted, anchors, abs(other))
