"""Graph smoothing: crossing elimination, spur removal, junction merging, gap bridging.

All edits work on a list of vertex-to-vertex pixel paths.  A vertex is a path
end pixel; its degree is the number of path ends sitting on it.  After every
edit, vertices of degree 2 are dissolved by joining their two paths, so the
final graph only has endpoints (1), junctions (3), free loop starts (2) and
isolated dots (0).

Crossings are resolved per *cluster*: a group of junction pixels tied
together by single-step paths (the usual thinning footprint of a crossing).
Its outgoing path ends are paired so each stroke continues with the smallest
turn, and each pair is routed through the cluster pixels so that no pixel is
lost.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .graph import ContourGraph, Pixel, assemble

End = tuple[int, int]  # (path index, 0 = first pixel / 1 = last pixel)

_ROUTE_CHOICES = 12
_MAX_COMBOS = 2000
_TANGENT_STEPS = 5


@dataclass(frozen=True)
class SmoothingParams:
    """Smoothing thresholds in pixels; ``None`` means the measured stroke width."""

    spur_length_max: float | None = None
    gap_bridge_max: float | None = None
    node_merge_radius: float | None = None
    mode: str = "lossy"

    def __post_init__(self):
        if self.mode not in ("lossless", "lossy"):
            raise ValueError(f"mode must be 'lossless' or 'lossy', not {self.mode!r}")
        for name in ("spur_length_max", "gap_bridge_max", "node_merge_radius"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ValueError(f"{name} must be >= 0")

    def radii(self, avg_line_width: float) -> tuple[float, float, float]:
        def pick(v):
            return avg_line_width if v is None else v

        return pick(self.spur_length_max), pick(self.gap_bridge_max), pick(self.node_merge_radius)


LOSSLESS = SmoothingParams(mode="lossless")


@dataclass
class SmoothingStats:
    crossings: int = 0
    spurs: int = 0
    merges: int = 0
    bridges: int = 0
    iterations: int = 0

    @property
    def edits(self) -> int:
        return self.crossings + self.spurs + self.merges + self.bridges


# --- path plumbing ------------------------------------------------------


def _end_pixel(paths, e: End) -> Pixel:
    return paths[e[0]][0 if e[1] == 0 else -1]


def _outward(paths, e: End) -> list[Pixel]:
    p = paths[e[0]]
    return p if e[1] == 0 else p[::-1]


def vertex_ends(paths) -> dict[Pixel, list[End]]:
    ends = defaultdict(list)
    for i, p in enumerate(paths):
        ends[p[0]].append((i, 0))
        ends[p[-1]].append((i, 1))
    return ends


def splice(paths, links=None, ext=None, drop=()) -> list[list[Pixel]]:
    """Rebuild paths after joining ends.

    ``links[a] = (b, route)`` joins end ``a`` to end ``b``; ``route`` runs from
    a's pixel to b's pixel, both included, and must be given for both
    directions.  ``ext[a] = route`` extends end ``a`` from its pixel to
    ``route[-1]``.  Paths in ``drop`` are deleted.
    """
    links = links or {}
    ext = ext or {}
    drop = set(drop)
    seen = set()
    out = []

    def follow(i, s):
        start = (i, s)
        pix = list(ext[start][::-1]) if start in ext else []
        while True:
            seen.add(i)
            seg = paths[i] if s == 0 else paths[i][::-1]
            pix.extend(seg[1:] if pix else seg)
            far = (i, 1 - s)
            if far in links:
                nxt, route = links[far]
                pix.extend(route[1:])
                if nxt == start:
                    return pix
                i, s = nxt
                continue
            if far in ext:
                pix.extend(ext[far][1:])
            return pix

    for i in range(len(paths)):
        if i in drop:
            continue
        for s in (0, 1):
            if i not in seen and (i, s) not in links:
                out.append(follow(i, s))
    closed = []
    for i in range(len(paths)):
        if i not in drop and i not in seen:
            closed.append(follow(i, 0))
    # a cycle made entirely of joins has no vertex of its own; keep its
    # start off pixels where other paths end
    taken = {q for p in out for q in (p[0], p[-1])}
    for p in closed:
        ring = p[:-1]
        free = [k for k, q in enumerate(ring) if q not in taken]
        k = free[0] if free else 0
        ring = ring[k:] + ring[:k]
        taken.add(ring[0])
        out.append(ring + [ring[0]])
    return out


def normalize(paths) -> list[list[Pixel]]:
    """Join the two paths meeting at every vertex of degree 2."""
    links = {}
    for v, ends in vertex_ends(paths).items():
        if len(ends) == 2 and ends[0][0] != ends[1][0]:
            a, b = ends
            links[a] = (b, [v])
            links[b] = (a, [v])
    return splice(paths, links) if links else paths


# --- (d) crossings ------------------------------------------------------


def _tangent(paths, e: End):
    p = _outward(paths, e)
    q = p[min(_TANGENT_STEPS, len(p) - 1)]
    return (q[0] - p[0][0], q[1] - p[0][1])


def turn_cost(u, w) -> float:
    """Turning angle when a stroke arrives along ``-u`` and leaves along ``w``."""
    nu, nw = math.hypot(*u), math.hypot(*w)
    if nu == 0 or nw == 0:
        return math.pi
    c = max(-1.0, min(1.0, (u[0] * w[0] + u[1] * w[1]) / (nu * nw)))
    return math.pi - math.acos(c)


def _matchings(items):
    if not items:
        yield []
        return
    a = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1 :]
        for m in _matchings(rest):
            yield [(a, items[k])] + m


def best_pairing(vectors) -> tuple[list[tuple[int, int]], list[int]]:
    """Pair outgoing directions for minimal total turning.

    With an odd count, three directions (one if there is a single one) stay
    unpaired and form a junction.
    """
    n = len(vectors)
    leave = 0 if n % 2 == 0 else min(3, n)
    idx = list(range(n))
    best = None
    for rest in itertools.combinations(idx, leave):
        pool = [i for i in idx if i not in rest]
        for m in _matchings(pool):
            cost = sum(turn_cost(vectors[a], vectors[b]) for a, b in m)
            if best is None or cost < best[0] - 1e-12:
                best = (cost, m, list(rest))
    return best[1], best[2]


def _greedy_pairing(vectors):
    n = len(vectors)
    leave = 0 if n % 2 == 0 else 3
    cand = sorted(
        (turn_cost(vectors[a], vectors[b]), a, b) for a in range(n) for b in range(a + 1, n)
    )
    used, pairs = set(), []
    for _, a, b in cand:
        if len(used) >= n - leave:
            break
        if a not in used and b not in used:
            pairs.append((a, b))
            used.update((a, b))
    return pairs, [i for i in range(n) if i not in used]


def _pairing(vectors):
    return best_pairing(vectors) if len(vectors) <= 8 else _greedy_pairing(vectors)


def _simple_routes(adj, a, b):
    """Simple paths from a to b inside a cluster, shortest first."""
    found = []

    def dfs(v, path):
        if v == b:
            found.append(list(path))
            return
        for n in adj[v]:
            if n not in path:
                path.append(n)
                dfs(n, path)
                path.pop()

    dfs(a, [a])
    found.sort(key=lambda r: (len(r), r))
    return found[:_ROUTE_CHOICES]


def _plan_cluster(paths, members, internal, ends):
    """Pairing and routes for one cluster, or None if the pixels cannot be covered."""
    adj = defaultdict(list)
    for i in internal:
        a, b = paths[i][0], paths[i][-1]
        adj[a].append(b)
        adj[b].append(a)
    for v in adj:
        adj[v].sort(key=lambda p: (p[1], p[0]))
    at = [_end_pixel(paths, e) for e in ends]
    pairs, rest = _pairing([_tangent(paths, e) for e in ends])
    mset = set(members)
    cache = {}

    def routes(a, b):
        if (a, b) not in cache:
            cache[(a, b)] = _simple_routes(adj, a, b)
        return cache[(a, b)]

    reps = sorted(members, key=lambda p: (p[1], p[0])) if rest else [None]
    best = None
    for rep in reps:
        options = [routes(at[a], at[b]) for a, b in pairs]
        options += [routes(at[k], rep) for k in rest]
        if any(not o for o in options):
            continue
        for combo in itertools.islice(itertools.product(*options), _MAX_COMBOS):
            covered = set()
            for r in combo:
                covered.update(r)
            if covered != mset:
                continue
            cost = sum(len(r) for r in combo)
            if rep is not None and len(mset) > 1:
                cost += 1000 * sum(rep in r for r in combo[: len(pairs)])
            if best is None or cost < best[0]:
                best = (cost, rep, combo)
            break
    if best is None:
        return None
    combo = best[2]
    return [(ends[a], ends[b], r) for (a, b), r in zip(pairs, combo)], [
        (ends[k], r) for k, r in zip(rest, combo[len(pairs) :])
    ]


def eliminate_crossings(paths) -> tuple[list[list[Pixel]], int]:
    """Replace every crossing by straight pass-through joins."""
    vends = vertex_ends(paths)
    hi = {v for v, e in vends.items() if len(e) >= 3}
    parent = {v: v for v in hi}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    link_ids = [i for i, p in enumerate(paths) if len(p) == 2 and p[0] in hi and p[1] in hi]
    for i in link_ids:
        ra, rb = find(paths[i][0]), find(paths[i][1])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = defaultdict(list)
    for v in hi:
        groups[find(v)].append(v)

    links, ext, drop = {}, {}, set()
    edits = 0

    def join(a, b, route):
        links[a] = (b, route)
        links[b] = (a, route[::-1])

    def per_pixel(v, ends):
        pairs, _ = _pairing([_tangent(paths, e) for e in ends])
        for a, b in pairs:
            join(ends[a], ends[b], [v])

    for root in sorted(groups, key=lambda p: (p[1], p[0])):
        members = sorted(groups[root], key=lambda p: (p[1], p[0]))
        if len(members) == 1 and len(vends[members[0]]) < 4:
            continue
        mset = set(members)
        internal = [i for i in link_ids if paths[i][0] in mset]
        iset = set(internal)
        ends = [e for v in members for e in vends[v] if e[0] not in iset]
        plan = _plan_cluster(paths, members, internal, ends) if ends else None
        if plan is None:
            busy = [v for v in members if len(vends[v]) >= 4]
            for v in busy:
                per_pixel(v, vends[v])
            edits += bool(busy)
            continue
        pairs, rest = plan
        for a, b, route in pairs:
            join(a, b, route)
        for e, route in rest:
            if len(route) > 1:
                ext[e] = route
        drop.update(internal)
        edits += 1
    if not edits:
        return paths, 0
    return splice(paths, links, ext, drop), edits


# --- (a, b) spurs -------------------------------------------------------


def remove_spurs(paths, dots, spur_max) -> tuple[list, list, int]:
    """Delete short branches hanging off junctions, then tiny isolated pieces.

    Spurs go one at a time, shortest first, so a junction that has lost one
    spur stops qualifying for the others.
    """
    deg = {v: len(e) for v, e in vertex_ends(paths).items()}
    order = sorted(range(len(paths)), key=lambda i: (len(paths[i]), paths[i][0][1], paths[i][0][0]))
    gone = set()
    for i in order:
        p = paths[i]
        if p[0] == p[-1] or len(p) - 1 > spur_max:
            continue
        d = sorted((deg[p[0]], deg[p[-1]]))
        if d[0] == 1 and d[1] >= 3:
            gone.add(i)
            deg[p[0]] -= 1
            deg[p[-1]] -= 1
    for i, p in enumerate(paths):
        if i not in gone and p[0] != p[-1] and deg[p[0]] == deg[p[-1]] == 1 and len(p) <= spur_max:
            gone.add(i)
    kept_dots = dots if spur_max < 1 else []
    edits = len(gone) + len(dots) - len(kept_dots)
    return [p for i, p in enumerate(paths) if i not in gone], kept_dots, edits


# --- (e) junction merging -----------------------------------------------


def merge_junctions(paths, radius) -> tuple[list[list[Pixel]], int]:
    """Fold pairs of nearby junctions joined by a short branch into one vertex.

    The second junction's other branches are extended along the connecting
    branch, so the merged vertex has four ends and the crossing rule resolves
    it on the next pass.  No pixel is removed.
    """
    vends = vertex_ends(paths)
    deg = {v: len(e) for v, e in vends.items()}
    cand = []
    for i, p in enumerate(paths):
        a, b = p[0], p[-1]
        if a == b or deg[a] != 3 or deg[b] != 3 or len(p) - 1 > radius:
            continue
        if math.dist(a, b) <= radius:
            cand.append((len(p), (a[1], a[0]), i))
    ext, drop, used = {}, set(), set()
    for _, _, i in sorted(cand):
        p = paths[i]
        a, b = p[0], p[-1]
        if a in used or b in used:
            continue
        if (a[1], a[0]) < (b[1], b[0]):
            route = p[::-1]  # from b (second) to a (first)
            second = b
        else:
            route = list(p)
            second = a
        others = [e for e in vends[second] if e[0] != i]
        if any(e[0] in drop or e in ext for e in others):
            continue
        for e in others:
            ext[e] = route
        drop.add(i)
        used.update((a, b))
    if not drop:
        return paths, 0
    return splice(paths, None, ext, drop), len(drop)


# --- (c) gap bridging ---------------------------------------------------


def line_pixels(a: Pixel, b: Pixel) -> list[Pixel]:
    """8-connected digital line from a to b, both included."""
    x0, y0 = a
    x1, y1 = b
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx, sy = (1 if x1 >= x0 else -1), (1 if y1 >= y0 else -1)
    err = dx + dy
    out = [(x0, y0)]
    while (x0, y0) != (x1, y1):
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
        out.append((x0, y0))
    return out


def bridge_gaps(paths, gap_max) -> tuple[list[list[Pixel]], int]:
    """Join mutually nearest endpoint pairs within ``gap_max`` by straight lines."""
    vends = vertex_ends(paths)
    tips = sorted((v for v, e in vends.items() if len(e) == 1), key=lambda p: (p[1], p[0]))
    if len(tips) < 2 or gap_max <= 0:
        return paths, 0
    nearest = {}
    for v in tips:
        best = None
        for w in tips:
            if w != v:
                d = math.dist(v, w)
                if best is None or d < best[0]:
                    best = (d, w)
        nearest[v] = best
    ink = {q for p in paths for q in p}
    links = {}
    count = 0
    for v in tips:
        d, w = nearest[v]
        if d > gap_max or nearest[w][1] != v or (w[1], w[0]) < (v[1], v[0]):
            continue
        ev, ew = vends[v][0], vends[w][0]
        if ev[0] == ew[0] and len(paths[ev[0]]) - 1 <= 3 * gap_max:
            continue
        line = line_pixels(v, w)
        inner = line[1:-1]
        if any(q in ink for q in inner):
            continue
        ink.update(inner)
        links[ev] = (ew, line)
        links[ew] = (ev, line[::-1])
        count += 1
    if not count:
        return paths, 0
    return splice(paths, links), count


# --- driver -------------------------------------------------------------


def _resolve_crossings(paths, stats, rounds=10):
    for _ in range(rounds):
        paths, k = eliminate_crossings(paths)
        paths = normalize(paths)
        stats.crossings += k
        if not k:
            break
    return _detach_loops(paths)


def _detach_loops(paths):
    """Move the start of a closed path off a vertex it would push past degree 3."""
    deg = Counter()
    for p in paths:
        deg[p[0]] += 1
        deg[p[-1]] += 1
    out = []
    for p in paths:
        v = p[0]
        if len(p) > 2 and p[-1] == v and deg[v] > 3:
            free = [i for i, q in enumerate(p[:-1]) if q not in deg]
            if free:
                i = min(free, key=lambda i: (p[i][1], p[i][0]))
                p = p[i:-1] + p[: i + 1]
                deg[v] -= 2
                deg[p[0]] += 2
        out.append(p)
    return out


def smooth_with_stats(g: ContourGraph, params: SmoothingParams = SmoothingParams()):
    """Smooth ``g``; returns ``(graph, SmoothingStats)``."""
    paths = normalize([list(p) for p in g.paths()])
    dots = [n.xy for n in g.nodes if n.index == 0]
    stats = SmoothingStats()
    if params.mode == "lossy":
        spur, gap, merge = params.radii(g.avg_line_width)
        for _ in range(10):
            stats.iterations += 1
            before = stats.edits
            paths = _resolve_crossings(paths, stats, rounds=1)
            paths, dots, k = remove_spurs(paths, dots, spur)
            paths = normalize(paths)
            stats.spurs += k
            paths, k = merge_junctions(paths, merge)
            paths = normalize(paths)
            stats.merges += k
            paths, k = bridge_gaps(paths, gap)
            paths = normalize(paths)
            stats.bridges += k
            if stats.edits == before:
                break
    paths = _resolve_crossings(paths, stats)
    return assemble(paths, dots, g.width, g.height, g.avg_line_width), stats


def smooth(g: ContourGraph, params: SmoothingParams = SmoothingParams()) -> ContourGraph:
    """Remove false nodes and crossings so that only endpoints and junctions remain."""
    return smooth_with_stats(g, params)[0]
