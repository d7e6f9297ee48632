"""Carving brick partitions along walks.

Constructive refinement procedures on discrete space models: nested
walk pairs, core refinements, doubling a path into two disjoint tracks,
spacing out a path, upgrading a reduced walk to a spaced path, and the
two-way conversion between circular coverings and cycle partitions.

Every operation works on one space model and refines partitions of it.
When the current mesh is too coarse for a side condition, the operation
subdivides the model and retries, up to a budget (default 4); exhausting
the budget raises SubdivisionBudgetError naming the failing clause.
All tie-breaks are by lowest vertex or block id, so outputs are
reproducible byte for byte.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graphs import Graph, GraphMap, cycle_graph
from .spaces import BrickPartition, SpaceModel
from .walks import CIRCULAR, LASSO, PLAIN, Walk, bfs_path


class SubdivisionBudgetError(RuntimeError):
    """An operation still failed after exhausting its subdivision budget."""

    def __init__(self, op: str, clause: str, depth: int):
        super().__init__(
            f"{op}: {clause} (gave up after {depth} subdivisions)")
        self.op = op
        self.clause = clause
        self.depth = depth


@dataclass(frozen=True)
class WalkOnPartition:
    """A walk on the nerve of a brick partition."""

    partition: BrickPartition
    walk: Walk

    def __post_init__(self):
        if self.walk.graph != self.partition.nerve:
            raise ValueError("walk does not live on the partition's nerve")

    def to_json(self) -> str:
        return json.dumps({
            "partition": json.loads(self.partition.to_json()),
            "kind": self.walk.kind,
            "split": self.walk.split,
            "vertices": list(self.walk.vertices),
        }, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "WalkOnPartition":
        data = json.loads(text)
        part = BrickPartition.from_json(json.dumps(data["partition"]))
        walk = Walk(part.nerve, data["kind"], tuple(data["vertices"]),
                    data["split"])
        return cls(part, walk)


def block_collapse(fine: BrickPartition,
                   coarse: BrickPartition) -> GraphMap:
    """Nerve map sending each fine block to the coarse block containing it.

    Unlike refinement_map this only requires nestedness, not that the
    collapse be a monotone epimorphism; carved partitions routinely fail
    the stronger condition while still being nested.
    """
    if fine.space != coarse.space:
        raise ValueError("partitions live on different spaces")
    values = []
    for i, blk in enumerate(fine.blocks):
        images = {coarse.block_of[v] for v in blk}
        if len(images) != 1:
            raise ValueError(
                f"block {i} straddles coarse blocks {sorted(images)}")
        values.append(images.pop())
    return GraphMap.make(fine.nerve, coarse.nerve, values)


def pair_refines(fine: WalkOnPartition, coarse: WalkOnPartition) -> bool:
    """Does (fine.partition, fine.walk) refine (coarse.partition, coarse.walk)?

    True iff the partitions are nested and the collapsed fine walk refines
    the coarse walk.  Raises ValueError when the partitions do not nest.
    """
    rho = block_collapse(fine.partition, coarse.partition)
    return fine.walk.induce(rho).refines(coarse.walk)


# --- shared plumbing ------------------------------------------------------

def _components(g: Graph, verts: Iterable[int]) -> list[set[int]]:
    """Fine components of a vertex subset, ordered by lowest member."""
    pool = set(verts)
    seen: set[int] = set()
    out = []
    for s in sorted(pool):
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.nbrs[x]:
                if y in pool and y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        out.append(comp)
    return out


def _has_cross_edge(p: BrickPartition, a: int, b: int) -> bool:
    g = p.space.fine
    blk = p.blocks[b]
    return any(y in blk for x in p.blocks[a] for y in g.nbrs[x])


_FAR = 10 ** 9


def _dist_from(g: Graph, sources: Iterable[int],
               within: Optional[set[int]] = None) -> list[int]:
    """Fine distance to the nearest source; -1 where unreachable.  With
    ``within``, only routes through that set count."""
    dist = [-1] * g.n
    queue: deque[int] = deque()
    for s in sorted(set(sources)):
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        x = queue.popleft()
        for y in g.nbrs[x]:
            if dist[y] < 0 and (within is None or y in within):
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def _fatten(g: Graph, core: Iterable[int], host: set[int],
            r: int) -> frozenset[int]:
    """Grow a connected core by r mesh steps without leaving its block."""
    core = set(core)
    if r <= 0:
        return frozenset(core)
    cand = g.ball(core, r) & host
    comp = set(core)
    queue = deque(sorted(core))
    while queue:
        x = queue.popleft()
        for y in g.nbrs[x]:
            if y in cand and y not in comp:
                comp.add(y)
                queue.append(y)
    return frozenset(comp)


def _widest_leg(g: Graph, a: int, b: int, host: set[int],
                clearance: Optional[list[int]]) -> Optional[list[int]]:
    """Path from a to b through host whose worst interior clearance is as
    large as possible, shortest among those.  A fixed safety margin would
    pin later carvings at a constant width no matter how fine the mesh; a
    bottleneck-max route grows its clearance with the mesh instead.

    ``clearance`` maps cells to distance-to-danger (-1 meaning far); the
    endpoints are exempt from the bottleneck, since they are forced."""

    def c(x: int) -> int:
        if clearance is None:
            return _FAR
        return clearance[x] if clearance[x] >= 0 else _FAR

    if a == b:
        return [a]
    best: dict[int, tuple[int, int]] = {a: (-_FAR, 0)}
    parent: dict[int, int] = {a: -1}
    heap: list[tuple[int, int, int]] = [(-_FAR, 0, a)]
    while heap:
        nb, d, x = heapq.heappop(heap)
        if best.get(x) != (nb, d):
            continue
        if x == b:
            path = [b]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            path.reverse()
            return path
        for y in g.nbrs[x]:
            if y == b:
                key = (nb, d + 1)
            elif y in host:
                key = (max(nb, -c(y)), d + 1)
            else:
                continue
            if y not in best or key < best[y]:
                best[y] = key
                parent[y] = x
                heapq.heappush(heap, (key[0], key[1], y))
    return None


def _stored_pairs(w: Walk) -> list[tuple[int, int]]:
    # circular walks store the closing repeat; lassos close implicitly
    vs = w.vertices
    pairs = [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]
    if w.kind == LASSO:
        pairs.append((vs[-1], vs[w.split]))
    return pairs


def _require_cross_edges(p: BrickPartition, w: Walk, op: str) -> None:
    """Steps backed only by a shared neighbor die under subdivision, so
    retry loops cannot carry them; reject such walks up front."""
    for a, b in _stored_pairs(w):
        if a != b and not _has_cross_edge(p, a, b):
            raise ValueError(
                f"{op}: step {a}-{b} has no fine cross edge and would not "
                f"survive subdivision")


def cross_nerve(p: BrickPartition) -> Graph:
    """The sub-nerve kept by subdivision: edges backed by a fine cross edge."""
    g = p.space.fine
    edges = set()
    for x in range(g.n):
        bx = p.block_of[x]
        for y in g.nbrs[x]:
            by = p.block_of[y]
            if bx != by:
                edges.add((min(bx, by), max(bx, by)))
    return Graph.from_edges(p.size, sorted(edges))


def _pull_all(parts: Sequence[BrickPartition]) -> list[BrickPartition]:
    sub, parent = parts[0].space.subdivide()
    return [p.pull_back(sub, parent) for p in parts]


def _rehost(w: Walk, g: Graph) -> Walk:
    return Walk(g, w.kind, w.vertices, w.split)


def _carve(p: BrickPartition,
           pieces: Sequence[tuple[int, frozenset[int]]],
           ) -> tuple[BrickPartition, list[int], dict[int, int]]:
    """Split the listed pieces out of their blocks.

    pieces: (host block, vertex set) with disjoint connected sets.  Returns
    the refined partition, the new id of each piece in input order, and the
    new id of every block that was left whole.  Leftover fragments of a
    carved block become one new block per fine component.
    """
    g = p.space.fine
    by_host: dict[int, list[int]] = {}
    for idx, (host, _) in enumerate(pieces):
        by_host.setdefault(host, []).append(idx)
    sets: list[set[int]] = []
    piece_id = [0] * len(pieces)
    whole_id: dict[int, int] = {}
    for b in range(p.size):
        if b not in by_host:
            whole_id[b] = len(sets)
            sets.append(set(p.blocks[b]))
            continue
        taken: set[int] = set()
        for idx in by_host[b]:
            piece_id[idx] = len(sets)
            sets.append(set(pieces[idx][1]))
            taken |= pieces[idx][1]
        for comp in _components(g, set(p.blocks[b]) - taken):
            sets.append(comp)
    labels = [0] * p.space.n
    for bid, s in enumerate(sets):
        for v in s:
            labels[v] = bid
    return BrickPartition(p.space, tuple(labels)), piece_id, whole_id


# --- core refinement ------------------------------------------------------

@dataclass(frozen=True)
class CoreRefinement:
    """Common refinement whose cores trace the second input's blocks.

    `u` and `v` are the inputs pulled back to the space the result lives
    on (`depth` subdivisions below where they started).
    """

    partition: BrickPartition
    u: BrickPartition
    v: BrickPartition
    depth: int


def check_core_refinement(w: BrickPartition, u: BrickPartition,
                          v: BrickPartition) -> Optional[str]:
    """None if w is a core refinement of (u, v), else the failing clause."""
    try:
        block_collapse(w, u)
    except ValueError as e:
        return f"not nested in the first input: {e}"
    nerve = w.nerve
    all_core: set[int] = set()
    for vi, V in enumerate(v.blocks):
        core = sorted(w.core(V))
        if not core:
            return f"core of region {vi} is empty"
        if not nerve.is_connected_subset(core):
            return f"core of region {vi} is disconnected"
        all_core.update(core)
    for b in range(w.size):
        if b in all_core:
            continue
        if not any(nerve.has_edge(b, c) for c in all_core):
            return f"block {b} is not adjacent to any core block"
    return None


def _try_core_refinement(u: BrickPartition, v: BrickPartition):
    """One carving attempt at the current mesh; labels or a failure string."""
    g = u.space.fine
    n = u.space.n
    anchors: list[set[int]] = []
    for vi, V in enumerate(v.blocks):
        bd = g.closure(V) - V
        deep = set(V) - g.ball(bd, 2) if bd else set(V)
        wanted = {u.block_of[x] for x in V}
        anchor = None
        for comp in _components(g, deep):
            if {u.block_of[x] for x in comp} >= wanted:
                anchor = comp
                break
        if anchor is None:
            return (f"region {vi} has no deep connected set meeting all "
                    f"{len(wanted)} overlapping blocks")
        anchors.append(anchor)
    label = [-1] * n
    next_id = 0
    for ui, U in enumerate(u.blocks):
        for vi, V in enumerate(v.blocks):
            overlap = U & V
            if not overlap:
                continue
            bd = g.closure(V) - V
            region = overlap - g.ball(bd, 1) if bd else set(overlap)
            targets = g.closure(anchors[vi] & U) & overlap
            # anchors stay 2 deep, so targets avoid the boundary ring
            reach = set()
            queue = deque(sorted(targets))
            reach |= targets
            while queue:
                x = queue.popleft()
                for y in g.nbrs[x]:
                    if y in region and y not in reach:
                        reach.add(y)
                        queue.append(y)
            for comp in _components(g, reach):
                for x in comp:
                    label[x] = next_id
                next_id += 1
        rest = [x for x in U if label[x] < 0]
        for comp in _components(g, rest):
            for x in comp:
                label[x] = next_id
            next_id += 1
    return tuple(label)


def core_refinement(u: BrickPartition, v: BrickPartition,
                    budget: int = 4) -> CoreRefinement:
    """Refine u so that every block of v owns a connected core of blocks
    and every other block leans on some core."""
    if u.space != v.space:
        raise ValueError("inputs partition different spaces")
    for depth in range(budget + 1):
        got = _try_core_refinement(u, v)
        fail: Optional[str]
        if isinstance(got, str):
            fail = got
        else:
            w = BrickPartition(u.space, got)
            fail = check_core_refinement(w, u, v)
            if fail is None:
                return CoreRefinement(w, u, v, depth)
        if depth == budget:
            raise SubdivisionBudgetError("core_refinement", fail, depth)
        u, v = _pull_all([u, v])
    raise AssertionError("unreachable")


# --- path doubling --------------------------------------------------------

@dataclass(frozen=True)
class DoubledPath:
    """Two nerve paths through a carved partition, disjoint except for the
    shared endpoint blocks, each collapsing monotonically onto the input."""

    partition: BrickPartition
    base: BrickPartition
    first: Walk
    second: Walk
    depth: int


def _two_ports(g: Graph, cands: Sequence[tuple[int, ...]], clear
               ) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Two crossing spots from the candidates: the best-cleared one, then
    the one farthest from it.  None when the gate is a single spot."""
    if not cands:
        return None

    def score(t: tuple[int, ...]) -> int:
        return min(clear(c) for c in t)

    best = max(cands, key=lambda t: (score(t),) + tuple(-c for c in t))
    dd = _dist_from(g, best)

    def far(t: tuple[int, ...]) -> int:
        return min((dd[c] if dd[c] >= 0 else _FAR) for c in t)

    second = max(cands,
                 key=lambda t: (far(t), score(t)) + tuple(-c for c in t))
    if far(second) < 1:
        return None
    return best, second


def _route_twins(g: Graph, hosts: Sequence[set[int]], ports: Sequence
                 ) -> Optional[tuple[list[set[int]], list[set[int]]]]:
    """One leg per layer per track between consecutive interface ports.

    Each gate is oriented so the tracks keep to their own sides, then the
    legs are re-routed alternately against the other track's full route.
    A single forward pass is not enough: a leg that only dodges its twin's
    pins still runs through the middle of every throat, and the twin is
    left squeezed against the wall no matter how fine the mesh."""
    m = len(hosts)
    pins0: list[tuple[int, int]] = []
    pins1: list[tuple[int, int]] = []
    ent0 = ports[0][0][0]
    ent1 = ports[0][1][0]
    for k in range(m):
        pa, pb = ports[k + 1]
        dmap = _dist_from(g, [ent0], within=hosts[k])

        def d(c: int) -> int:
            return dmap[c] if dmap[c] >= 0 else _FAR

        if d(pa[0]) <= d(pb[0]):
            ex0, ex1 = pa, pb
        else:
            ex0, ex1 = pb, pa
        pins0.append((ent0, ex0[0]))
        pins1.append((ent1, ex1[0]))
        if k + 1 < m:
            ent0, ent1 = ex0[1], ex1[1]

    legs0: list[list[int]] = []
    legs1: list[Optional[list[int]]] = [None] * m
    seed = _dist_from(g, {c for a, b in pins1 for c in (a, b)})
    for k, (a, b) in enumerate(pins0):
        leg = _widest_leg(g, a, b, hosts[k], seed)
        if leg is None:
            return None
        legs0.append(leg)
    for _ in range(2):
        avoid = _dist_from(g, set().union(*map(set, legs0)))
        for k, (a, b) in enumerate(pins1):
            legs1[k] = _widest_leg(g, a, b, hosts[k], avoid)
            if legs1[k] is None:
                return None
        avoid = _dist_from(g, set().union(*map(set, legs1)))
        for k, (a, b) in enumerate(pins0):
            leg = _widest_leg(g, a, b, hosts[k], avoid)
            if leg is None:
                return None
            legs0[k] = leg
    return [set(s) for s in legs0], [set(s) for s in legs1]


def _pebble_track(g: Graph, blocks, interior: Sequence[int],
                  first_nbrs: frozenset[int], last_nbrs: frozenset[int]
                  ) -> Optional[list[int]]:
    """One fine path through the tube touching each interior block in at
    least two vertices; its even and odd positions then form two tracks
    one mesh step apart."""
    lam: list[int] = []
    prev: Optional[int] = None
    for idx, b in enumerate(interior):
        B = set(blocks[b])
        if idx == 0:
            entries = sorted(x for x in B
                             if any(y in first_nbrs for y in g.nbrs[x]))
        else:
            entries = sorted(x for x in B if prev in g.nbrs[x])
        if not entries:
            return None
        entry = entries[0]
        ahead = blocks[interior[idx + 1]] if idx + 1 < len(interior) \
            else last_nbrs
        exits = {x for x in B if any(y in ahead for y in g.nbrs[x])}
        if not exits:
            return None
        try:
            seg = bfs_path(g, entry, exits, B)
        except ValueError:
            return None
        if len(seg) == 1:
            others = exits - {entry}
            if not others:
                return None
            try:
                seg = bfs_path(g, entry, others, B)
            except ValueError:
                return None
        lam.extend(seg)
        prev = seg[-1]
    return lam


def path_doubling(p: BrickPartition, u: Walk,
                  budget: int = 4) -> DoubledPath:
    """Split a path's tube into two tracks that are disjoint except for the
    endpoint blocks and both collapse monotonically onto the path."""
    if u.graph != p.nerve:
        raise ValueError("walk does not live on the partition's nerve")
    if u.kind != PLAIN or not u.is_path():
        raise ValueError("doubling needs a plain path")
    if len(u.vertices) <= 2:
        return DoubledPath(p, p, u, u, 0)
    _require_cross_edges(p, u, "path_doubling")

    for depth in range(budget + 1):
        got = _try_double(p, u)
        if got is not None:
            part, w0, w1 = got
            rho = block_collapse(part, p)
            assert w0.induce(rho).monotone_witness(u) is not None
            assert w1.induce(rho).monotone_witness(u) is not None
            shared = {w0.vertices[0], w0.vertices[-1]}
            assert set(w0.vertices) & set(w1.vertices) == shared
            return DoubledPath(part, p, w0, w1, depth)
        if depth == budget:
            raise SubdivisionBudgetError(
                "path_doubling",
                "no two disjoint tracks through the tube", depth)
        p, = _pull_all([p])
        u = _rehost(u, p.nerve)
    raise AssertionError("unreachable")


def _try_double(p: BrickPartition, u: Walk):
    g = p.space.fine
    blocks = p.blocks
    vs = u.vertices
    interior = vs[1:-1]
    hosts = [set(blocks[b]) for b in interior]
    m = len(hosts)
    U0 = blocks[vs[0]]
    UL = blocks[vs[-1]]
    union = set().union(*hosts)
    dd_out = _dist_from(g, (x for x in range(g.n) if x not in union))

    def clear(c: int) -> int:
        return dd_out[c] if dd_out[c] >= 0 else _FAR

    # two pinch spots per interface, then twin legs through every layer.
    # The spots sit as far apart as each gate allows, so the slack between
    # the tracks scales with the mesh and downstream carvings can thread
    # inside the fattened pieces.
    ports: list[Optional[tuple]] = []
    ends = sorted(x for x in hosts[0] if any(y in U0 for y in g.nbrs[x]))
    ports.append(_two_ports(g, [(x,) for x in ends], clear))
    for k in range(1, m):
        cands = [(x, y) for x in sorted(hosts[k - 1])
                 for y in g.nbrs[x] if y in hosts[k]]
        ports.append(_two_ports(g, cands, clear))
    lasts = sorted(x for x in hosts[m - 1] if any(y in UL for y in g.nbrs[x]))
    ports.append(_two_ports(g, [(x,) for x in lasts], clear))

    tracks: Optional[tuple[list[frozenset[int]], list[frozenset[int]]]] = None
    fat = 0
    if all(pt is not None for pt in ports):
        twin = _route_twins(g, hosts, ports)
        if twin is not None:
            dmap = _dist_from(g, set().union(*twin[0]))
            dmin = min(dmap[x] for x in set().union(*twin[1]))
            if dmin >= 3:
                fat = (dmin - 3) // 2
                tracks = ([frozenset(s) for s in twin[0]],
                          [frozenset(s) for s in twin[1]])
    if tracks is None:
        lam = _pebble_track(g, blocks, interior, U0, UL)
        if lam is None:
            return None
        fat = 0
        layer = {}
        for idx, b in enumerate(interior):
            for x in blocks[b]:
                layer[x] = idx
        t0 = [frozenset({x}) for x in lam[0::2]]
        t1 = [frozenset({x}) for x in lam[1::2]]
        for track in (t0, t1):
            if sorted({layer[next(iter(s))] for s in track}) != \
                    list(range(len(interior))):
                return None
        tracks = t0, t1

    pieces: list[tuple[int, frozenset[int]]] = []
    labels0: list[int] = []
    labels1: list[int] = []
    for track, out in ((tracks[0], labels0), (tracks[1], labels1)):
        for s in track:
            host = interior[_layer_of(s, blocks, interior)]
            out.append(len(pieces))
            pieces.append((host, _fatten(g, s, set(blocks[host]), fat)))
    part, ids, whole = _carve(p, pieces)
    first = Walk(part.nerve, PLAIN,
                 (whole[vs[0]], *(ids[i] for i in labels0), whole[vs[-1]]))
    second = Walk(part.nerve, PLAIN,
                  (whole[vs[0]], *(ids[i] for i in labels1), whole[vs[-1]]))
    return part, first, second


def _layer_of(s: frozenset[int], blocks, interior: Sequence[int]) -> int:
    x = next(iter(s))
    for idx, b in enumerate(interior):
        if x in blocks[b]:
            return idx
    raise AssertionError("track vertex escaped the tube")


# --- spacing out ----------------------------------------------------------

@dataclass(frozen=True)
class SpacedWalk:
    """A spaced path carved out of a walk's own blocks.

    The walk collapses block-by-block onto the input by a monotone
    stutter.  `base` is the input partition pulled to the same space.
    """

    partition: BrickPartition
    base: BrickPartition
    walk: Walk
    depth: int


def _walk_layout(w: Walk):
    """Positions, crossing arcs, and the position pairs a spaced path of
    this kind must keep non-adjacent."""
    if w.kind == PLAIN:
        pos = list(w.vertices)
        n = len(pos)
        arcs = [(i, i + 1) for i in range(n - 1)]
        sep = [(i, j) for i in range(n) for j in range(i + 2, n)]
    elif w.kind == CIRCULAR:
        pos = list(w.vertices[:-1])
        n = len(pos)
        arcs = [(i, (i + 1) % n) for i in range(n)] if n > 1 else []
        sep = [(i, j) for i in range(n) for j in range(i + 1, n)
               if min(j - i, n - (j - i)) >= 2]
    else:
        pos = list(w.vertices)
        t = w.split
        total = len(pos)
        c = total - t
        arcs = [(i, i + 1) for i in range(total - 1)]
        arcs.append((total - 1, t))
        sep = [(i, j) for i in range(t) for j in range(i + 2, t)]
        sep += [(t + a, t + b) for a in range(c) for b in range(a + 1, c)
                if min(b - a, c - (b - a)) >= 2]
    arcs = [(a, b) for (a, b) in arcs if a != b]
    return pos, arcs, sep


def _neighbors_inside(p: BrickPartition, w: Walk) -> bool:
    wset = set(w.vertices)
    nerve = p.nerve
    return all(set(nerve.nbrs[b]) <= wset for b in wset)


def _try_space_out(p: BrickPartition, w: Walk, frozen: frozenset[int],
                   insulate: bool):
    """One carving attempt: thread a chain through each visited block, keep
    the chains clear of the blocks they must stay separated from, then
    fatten each chain as far as the clearances allow.  Blocks listed in
    ``frozen`` stay whole; only the others are carved.  With ``insulate``
    every carved piece also keeps two steps clear of blocks off the walk,
    so that no nerve neighbor of the result collapses outside the walk."""
    g = p.space.fine
    blocks = p.blocks
    pos, arcs, sep = _walk_layout(w)
    n = len(pos)
    keep = [b in frozen for b in pos]
    cells = [set(blocks[b]) for b in pos]
    partners: list[set[int]] = [set() for _ in range(n)]
    for i, j in sep:
        partners[i].add(j)
        partners[j].add(i)
    outside_all = set(range(g.n)) - set().union(*cells)
    danger = [set().union(*(cells[j] for j in partners[i]))
              if partners[i] else set() for i in range(n)]

    # crossing points, pushed as far as possible from the separated blocks
    # and from blocks off the walk; a frozen block stays whole, so its own
    # side of a crossing needs no pin
    entries: list[list[int]] = [[] for _ in range(n)]
    exits: list[list[int]] = [[] for _ in range(n)]
    for a, b in arcs:
        if keep[a] and keep[b]:
            continue
        bad = danger[a] | danger[b] | outside_all
        dd = _dist_from(g, bad) if bad else None
        best: Optional[tuple[int, int, int]] = None
        for e in sorted(cells[b]):
            for s in g.nbrs[e]:
                if s not in cells[a]:
                    continue
                if dd is None:
                    sc = _FAR
                else:
                    sc = min(dd[s] if dd[s] >= 0 else _FAR,
                             dd[e] if dd[e] >= 0 else _FAR)
                if best is None or sc > best[0]:
                    best = (sc, e, s)
        if best is None:
            return None
        if not keep[b]:
            entries[b].append(best[1])
        if not keep[a]:
            exits[a].append(best[2])

    # interior-depth map per carved block: anchors sit at the deepest cell
    # and growth stops short of the block's own thickness
    din: list[Optional[list[int]]] = [None] * n
    for i in range(n):
        if keep[i]:
            continue
        outside = [x for x in range(g.n) if x not in cells[i]]
        din[i] = _dist_from(g, outside) if outside else None

    # free ends of the walk get a deep interior anchor, so the carved end
    # pieces reach well into their blocks and later carvings have room
    anchors: list[list[int]] = [[] for _ in range(n)]
    anchor_at = []
    if w.kind in (PLAIN, LASSO) and not keep[0]:
        anchor_at.append(0)
    if w.kind == PLAIN and n > 1 and not keep[n - 1]:
        anchor_at.append(n - 1)
    for i in anchor_at:
        dd = _dist_from(g, danger[i]) if danger[i] else None
        dn = din[i]
        best = None
        for x in sorted(cells[i]):
            da = _FAR if dd is None else (dd[x] if dd[x] >= 0 else _FAR)
            db = _FAR if dn is None else (dn[x] if dn[x] >= 0 else _FAR)
            sc = min(da, db)
            if best is None or sc > best[0]:
                best = (sc, x)
        anchors[i].append(best[1])

    gammas: list[set[int]] = []
    for i in range(n):
        if keep[i]:
            gammas.append(cells[i])
            continue
        chain = list(dict.fromkeys(entries[i] + exits[i] + anchors[i]))
        if not chain:
            chain = [min(cells[i])]
        base = chain[0]
        gam = {base}
        avoid = danger[i] | outside_all if insulate else danger[i]
        dd = _dist_from(g, avoid) if avoid else None
        for q in chain[1:]:
            leg = _widest_leg(g, base, q, cells[i], dd)
            if leg is None:
                return None
            gam |= set(leg)
        gammas.append(gam)

    # growth capped at half the separation slack and at half the block's
    # own thickness: a piece that ate its whole clearance or its whole
    # block would leave no leftover for later connectors to route through
    radius = [0 if keep[i] else g.n for i in range(n)]
    for i in range(n):
        if not keep[i] and din[i] is not None:
            thick = max(din[i][x] for x in cells[i])
            radius[i] = min(radius[i], (thick - 1) // 2)
    if insulate and outside_all:
        dd_out = _dist_from(g, outside_all)
        for i in range(n):
            if keep[i]:
                continue
            di = min(dd_out[x] if dd_out[x] >= 0 else _FAR
                     for x in gammas[i])
            radius[i] = min(radius[i], di - 3)
    cur_i = -1
    dmap: list[int] = []
    for i, j in sep:
        if keep[i] and keep[j]:
            continue
        if i != cur_i:
            cur_i = i
            dmap = _dist_from(g, gammas[i])
        dij = min(dmap[x] for x in gammas[j])
        cap = (dij - 3) // 2
        if not keep[i]:
            radius[i] = min(radius[i], cap)
        if not keep[j]:
            radius[j] = min(radius[j], cap)
    if any(r < 0 for r in radius):
        return None
    radius = [r // 2 for r in radius]

    pieces = [(pos[i], _fatten(g, gammas[i], cells[i], radius[i]))
              for i in range(n)]
    balls = [g.ball(s, 2) for _, s in pieces]
    if insulate:
        for ball in balls:
            if ball & outside_all:
                return None
    for i, j in sep:
        if balls[i] & pieces[j][1]:
            return None
    part, ids, _ = _carve(p, pieces)
    verts = tuple(ids) + ((ids[0],) if w.kind == CIRCULAR else ())
    return part, Walk(part.nerve, w.kind, verts, w.split)


def space_out(p: BrickPartition, w: Walk, budget: int = 4) -> SpacedWalk:
    """Carve a spaced path out of a walk's blocks, keeping its kind.

    Every nerve neighbor of the result collapses into the walk's own
    vertex set, so the spaced path stays insulated from the rest of the
    partition."""
    if w.graph != p.nerve:
        raise ValueError("walk does not live on the partition's nerve")
    if not w.is_path():
        raise ValueError("spacing needs a path (plain, circular or lasso)")
    if w.is_spaced() and _neighbors_inside(p, w):
        return SpacedWalk(p, p, w, 0)
    _require_cross_edges(p, w, "space_out")
    for depth in range(budget + 1):
        got = _try_space_out(p, w, frozenset(), insulate=True)
        if got is not None:
            part, z = got
            rho = block_collapse(part, p)
            assert z.is_path() and z.is_spaced()
            assert z.induce(rho).monotone_witness(w) is not None
            wset = set(w.vertices)
            assert all(rho.values[nb] in wset
                       for b in z.vertices for nb in part.nerve.nbrs[b])
            return SpacedWalk(part, p, z, depth)
        if depth == budget:
            raise SubdivisionBudgetError(
                "space_out",
                "crossing chains stay within two steps of each other", depth)
        p, = _pull_all([p])
        w = _rehost(w, p.nerve)
    raise AssertionError("unreachable")


# --- upgrading walks to paths ---------------------------------------------

class _StepFailed(Exception):
    """One induction step cannot be completed at the current mesh."""

    def __init__(self, step, reason: str):
        self.step = step
        self.reason = reason
        super().__init__(f"step {step}: {reason}")


def _connector_routes(xn: Graph, w0: Walk, w1: Walk, rho2: GraphMap,
                      wstar: int, prevreg: int, region: int,
                      prev_blocks: set[int], uncrossed: bool,
                      reasons: list[str]):
    """Candidate splice sequences ending at ``wstar``, most direct first.

    First the shortest connector through untouched blocks of the previous
    region, then connectors forced through each leftover adjacent to the
    walk's end (the direct cross edge can be a pinched corner no carving
    survives), last the seam rewiring for connectors that must run along
    the doubled tracks.  Construction failures land in ``reasons``."""
    walkset = set(w0.vertices) | set(w1.vertices)
    shared_end = w0.vertices[-1]
    leftovers = prev_blocks - walkset
    seen: set[tuple[int, ...]] = set()

    try:
        wbar = bfs_path(xn, shared_end, {wstar}, leftovers)
        verts = w0.vertices + tuple(wbar[1:])
        seen.add(verts)
        yield verts
    except ValueError:
        pass

    for u in xn.nbrs[shared_end]:
        if u not in leftovers:
            continue
        try:
            sub = bfs_path(xn, u, {wstar}, leftovers)
        except ValueError:
            continue
        verts = w0.vertices + tuple(sub)
        if verts not in seen:
            seen.add(verts)
            yield verts

    try:
        wbar = bfs_path(xn, shared_end, {wstar}, prev_blocks)
    except ValueError:
        reasons.append("previous region is disconnected at this mesh")
        return
    pos0 = {b: i for i, b in enumerate(w0.vertices)}
    pos1 = {b: i for i, b in enumerate(w1.vertices)}

    def run_start(wk: Walk) -> int:
        i = len(wk.vertices) - 1
        while i > 0 and rho2.values[wk.vertices[i - 1]] == prevreg:
            i -= 1
        return i

    if uncrossed:
        fr0, fr1 = run_start(w0), run_start(w1)
        relevant = walkset & prev_blocks
        comp = {shared_end}
        queue = deque([shared_end])
        while queue:
            a = queue.popleft()
            for b in xn.nbrs[a]:
                if b in relevant and b not in comp:
                    comp.add(b)
                    queue.append(b)

        def in_final_run(b: int) -> bool:
            return ((b in pos0 and pos0[b] >= fr0)
                    or (b in pos1 and pos1[b] >= fr1))

        touches = [q for q in range(len(wbar) - 1)
                   if wbar[q] in comp and in_final_run(wbar[q])]
        if not touches:
            reasons.append("connector misses the final runs")
            return
        q0 = max(touches)
        b0 = wbar[q0]
        if b0 in pos0 and pos0[b0] >= fr0:
            A, B, posA, posB = w0, w1, pos0, pos1
        else:
            A, B, posA, posB = w1, w0, pos1, pos0
        i = posA[b0]
        after = [q for q in range(q0 + 1, len(wbar) - 1)
                 if wbar[q] in walkset]
        if not after:
            verts = A.vertices[:i + 1] + tuple(wbar[q0 + 1:])
        else:
            q1 = min(after)
            c = wbar[q1]
            carrier, posC = (A, posA) if c in posA else (B, posB)
            i2 = posC[c]
            seg = []
            ok = False
            for r in range(i2 + 1, len(carrier.vertices)):
                seg.append(carrier.vertices[r])
                if rho2.values[carrier.vertices[r]] == region:
                    ok = True
                    break
            if not ok:
                reasons.append(
                    "forward run never crosses into the new region")
                return
            middle = tuple(wbar[q0 + 1:q1 + 1]) + tuple(seg)
            if carrier is A:
                verts = (B.vertices + tuple(reversed(A.vertices[i:-1]))
                         + middle)
            else:
                verts = A.vertices[:i + 1] + middle
    else:
        touches = [q for q in range(len(wbar) - 1)
                   if wbar[q] in walkset]
        q0 = max(touches)
        b0 = wbar[q0]
        if b0 in pos0:
            A, B, i = w0, w1, pos0[b0]
        else:
            A, B, i = w1, w0, pos1[b0]
        verts = (B.vertices + tuple(reversed(A.vertices[i:-1]))
                 + tuple(wbar[q0 + 1:]))
    if verts not in seen:
        yield verts


def _leftover_routes(xn: Graph, z: Walk, wstar: int, prev_blocks: set[int]):
    """Splice sequences from the standing path's end to ``wstar`` through
    blocks of the previous region the path never touched, most direct
    first, then forced through each leftover adjacent to the end (the
    direct cross edge can be a pinched corner no carving survives)."""
    walkset = set(z.vertices)
    end = z.vertices[-1]
    leftovers = prev_blocks - walkset
    seen: set[tuple[int, ...]] = set()
    try:
        wbar = bfs_path(xn, end, {wstar}, leftovers)
        verts = z.vertices + tuple(wbar[1:])
        seen.add(verts)
        yield verts
    except ValueError:
        pass
    for u in xn.nbrs[end]:
        if u not in leftovers:
            continue
        try:
            sub = bfs_path(xn, u, {wstar}, leftovers)
        except ValueError:
            continue
        verts = z.vertices + tuple(sub)
        if verts not in seen:
            seen.add(verts)
            yield verts


def _advance(part: BrickPartition, rho: GraphMap, v: Walk, z: Walk,
             step: int, uncrossed: bool):
    """Extend z by one entry of v.  First try splicing a connector through
    untouched blocks onto the unchanged tail, carving only the new blocks;
    when every such route dies, double the tube and rewire a connector
    along the tracks.  Landing blocks and routes are tried in order until
    one survives re-spacing."""
    region = v.vertices[step]
    prevreg = v.vertices[step - 1]
    want = Walk(v.graph, PLAIN, v.vertices[:step + 1])
    reasons: list[str] = []

    def attempt(part_a: BrickPartition, rho_a: GraphMap,
                verts: tuple[int, ...], frozen: frozenset[int]):
        try:
            z2 = Walk(part_a.nerve, PLAIN, verts)
        except ValueError as e:
            return None, f"splice is not a walk: {e}"
        if not z2.is_path():
            return None, "splice revisits a block"
        try:
            _require_cross_edges(part_a, z2, "splice")
        except ValueError as e:
            return None, str(e)
        # carve even when the splice is already spaced: the next step's
        # landing block must come from the leftovers this carving makes,
        # so every visited region has to keep some
        got = _try_space_out(part_a, z2, frozen, insulate=False)
        if got is None:
            return None, ("respacing failed: crossing chains stay within "
                          "two steps of each other")
        part3, z3 = got
        assert z3.is_path() and z3.is_spaced()
        rho3 = rho_a.compose(block_collapse(part3, part_a))
        image = z3.induce(rho3)
        if uncrossed:
            if image.monotone_witness(want) is None:
                return None, "splice lost the stuttering structure"
        elif not image.refines(want):
            return None, "splice lost the refinement prefix"
        return (part3, rho3, z3), None

    # splicing onto the unchanged tail keeps the tail's pieces frozen, so
    # piece sizes depend on the mesh alone, not on how many steps came
    # before; the first step has no tail worth keeping whole
    xn = cross_nerve(part)
    reg_blocks = {b for b in range(part.size) if rho.values[b] == region}
    prev_blocks = {b for b in range(part.size) if rho.values[b] == prevreg}
    walkset = frozenset(z.vertices)
    frozen = walkset if step > 1 else frozenset()
    fresh = sorted(b for b in reg_blocks - walkset
                   if any(c in prev_blocks for c in xn.nbrs[b]))
    for wstar in fresh:
        for verts in _leftover_routes(xn, z, wstar, prev_blocks):
            got, why = attempt(part, rho, verts, frozen)
            if got is not None:
                return got
            reasons.append(why)

    # fallback for connectors that must cross the standing path
    try:
        dbl = path_doubling(part, z, budget=0)
    except (SubdivisionBudgetError, ValueError) as e:
        reasons.append(f"doubling failed: {e}")
        raise _StepFailed(step, "; ".join(dict.fromkeys(reasons)))
    part2 = dbl.partition
    rho2 = rho.compose(block_collapse(part2, part))
    w0, w1 = dbl.first, dbl.second
    xn2 = cross_nerve(part2)
    reg2 = {b for b in range(part2.size) if rho2.values[b] == region}
    prev2 = {b for b in range(part2.size) if rho2.values[b] == prevreg}
    tracks = set(w0.vertices) | set(w1.vertices)
    fresh2 = sorted(b for b in reg2 - tracks
                    if any(c in prev2 for c in xn2.nbrs[b]))
    if not fresh2:
        reasons.append("every landing block lies on the doubled tracks")
    for wstar in fresh2:
        for verts in _connector_routes(xn2, w0, w1, rho2, wstar, prevreg,
                                       region, prev2, uncrossed, reasons):
            got, why = attempt(part2, rho2, verts, frozenset())
            if got is not None:
                return got
            reasons.append(why)
    raise _StepFailed(step, "; ".join(dict.fromkeys(reasons))
                      if reasons else "no connector reaches a fresh block")


def _upgrade_pass(p: BrickPartition, v: Walk):
    uncrossed = v.is_uncrossed()
    part, rho = p, GraphMap.identity(p.nerve)
    z = Walk(p.nerve, PLAIN, (v.vertices[0],))
    for step in range(1, len(v.vertices)):
        part, rho, z = _advance(part, rho, v, z, step, uncrossed)
    return part, z


def upgrade_to_path(p: BrickPartition, v: Walk,
                    budget: int = 4) -> SpacedWalk:
    """Refine a reduced walk into a spaced path on a carved partition.

    One splice per walk entry, re-spacing as it goes and doubling the
    standing path only when the connector has to cross it.  The result's
    collapse refines v, monotonically when v is uncrossed.
    """
    if v.graph != p.nerve:
        raise ValueError("walk does not live on the partition's nerve")
    if v.kind != PLAIN:
        raise ValueError("upgrading needs a plain walk")
    if not v.is_reduced():
        raise ValueError("upgrading needs a reduced walk")
    _require_cross_edges(p, v, "upgrade_to_path")
    for depth in range(budget + 1):
        try:
            part, z = _upgrade_pass(p, v)
        except _StepFailed as e:
            if depth == budget:
                raise SubdivisionBudgetError(
                    "upgrade_to_path",
                    f"induction step {e.step}: {e.reason}", depth)
            p, = _pull_all([p])
            v = _rehost(v, p.nerve)
            continue
        rho = block_collapse(part, p)
        image = z.induce(rho)
        assert z.is_path() and z.is_spaced()
        assert image.refines(v)
        if v.is_uncrossed():
            assert image.monotone_witness(v) is not None
        return SpacedWalk(part, p, z, depth)
    raise AssertionError("unreachable")


# --- circular coverings vs cycle partitions ---------------------------------

@dataclass(frozen=True)
class CircularCovering:
    """Connected overlapping vertex sets in cyclic position.

    `partition` is the carved partition whose stars produced the sets;
    `base` is the input pulled to the same space.
    """

    sets: tuple[frozenset[int], ...]
    partition: BrickPartition
    base: BrickPartition
    depth: int


@dataclass(frozen=True)
class CyclePartition:
    """A partition with cycle nerve, plus the covering it came from,
    pulled to the space the partition lives on."""

    partition: BrickPartition
    cover: tuple[frozenset[int], ...]
    depth: int


def check_circular_cover(space: SpaceModel,
                         cover: Sequence[frozenset[int]]) -> Optional[str]:
    """None for a circular covering of the space, else the failing clause."""
    g = space.fine
    count = len(cover)
    if count < 4:
        return f"needs at least 4 pieces, got {count}"
    for i, O in enumerate(cover):
        if not O:
            return f"piece {i} is empty"
        if not g.is_connected_subset(O):
            return f"piece {i} is disconnected"
    if set().union(*cover) != set(range(g.n)):
        return "pieces do not cover the space"
    closures = [g.closure(O) for O in cover]
    for i in range(count):
        for j in range(i + 1, count):
            gap = min(j - i, count - (j - i))
            if bool(closures[i] & closures[j]) != (gap <= 1):
                return f"closure intersection pattern fails at pair ({i},{j})"
    for i in range(count):
        core = set(cover[i])
        for j in range(count):
            if j != i:
                core -= cover[j]
        if not core:
            return f"piece {i} has an empty core"
        if not g.is_connected_subset(core):
            return f"piece {i} has a disconnected core"
    return None


def _cycle_order(g: Graph) -> Optional[list[int]]:
    """Vertices of g in cyclic order, lowest first, or None if g is not a
    single cycle with at least 4 vertices."""
    if g.n < 4 or any(len(nb) != 2 for nb in g.nbrs):
        return None
    order = [0, min(g.nbrs[0])]
    while True:
        a, b = order[-2], order[-1]
        nxt = [c for c in g.nbrs[b] if c != a]
        if len(nxt) != 1:
            return None
        if nxt[0] == 0:
            break
        order.append(nxt[0])
        if len(order) > g.n:
            return None
    return order if len(order) == g.n else None


def covering_from_cycle_partition(p: BrickPartition,
                                  budget: int = 4) -> CircularCovering:
    """Fatten the blocks of a cycle partition into a circular covering.

    Carves a core refinement of (p, p), takes the star of each block's
    closure in it, and checks the covering clauses; subdivides until the
    stars of blocks two apart stay non-adjacent.
    """
    order = _cycle_order(p.nerve)
    if order is None:
        raise ValueError("nerve is not a cycle of length at least 4")
    count = len(order)
    for depth in range(budget + 1):
        fail: str
        try:
            cr = core_refinement(p, p, budget=0)
        except SubdivisionBudgetError as e:
            fail = e.clause
            cr = None
        if cr is not None:
            w = cr.partition
            nerve_w = w.nerve
            stars = [w.star(p.blocks[b]) for b in order]
            fail = ""
            for i in range(count):
                for j in range(i + 1, count):
                    if min(j - i, count - (j - i)) < 2:
                        continue
                    if any(nerve_w.has_edge(a, b)
                           for a in stars[i] for b in stars[j]):
                        fail = (f"stars of blocks {order[i]} and {order[j]} "
                                f"touch")
                        break
                if fail:
                    break
            if not fail:
                sets = tuple(
                    frozenset().union(*(w.blocks[a] for a in star))
                    for star in stars)
                fail = check_circular_cover(p.space, sets) or ""
                if not fail:
                    return CircularCovering(sets, w, p, depth)
        if depth == budget:
            raise SubdivisionBudgetError(
                "covering_from_cycle_partition", fail, depth)
        p, = _pull_all([p])
    raise AssertionError("unreachable")


def _try_cycle_partition(space: SpaceModel, cover):
    g = space.fine
    count = len(cover)
    closures = [g.closure(O) for O in cover]
    cores = []
    for i in range(count):
        core = set(closures[i])
        for j in range(count):
            if j != i:
                core -= cover[j]
        cores.append(core)
    dists = []
    for i in range(count):
        d: dict[int, int] = {x: -1 for x in cover[i]}
        queue = deque(sorted(cores[i]))
        for s in cores[i]:
            d[s] = 0
        while queue:
            x = queue.popleft()
            for y in g.nbrs[x]:
                if y in d and d[y] < 0:
                    d[y] = d[x] + 1
                    queue.append(y)
        dists.append(d)
    far = g.n + 1
    label = [-1] * g.n
    for x in range(g.n):
        owners = [i for i in range(count) if x in cover[i]]
        if len(owners) == 1:
            label[x] = owners[0]
            continue
        a, b = owners
        if (a, b) == (0, count - 1):
            a, b = b, a
        da = dists[a][x] if dists[a][x] >= 0 else far
        db = dists[b][x] if dists[b][x] >= 0 else far
        label[x] = a if da <= db else b
    try:
        return BrickPartition(space, tuple(label))
    except ValueError as e:
        return f"distance split leaves a class disconnected: {e}"


def cycle_partition_from_covering(space: SpaceModel,
                                  cover: Sequence[Iterable[int]],
                                  budget: int = 4) -> CyclePartition:
    """Collapse a circular covering into a partition with cycle nerve.

    Each overlap is split between its two pieces by fine distance to the
    piece cores; ties go to the lower cyclic index.
    """
    sets = tuple(frozenset(O) for O in cover)
    fail = check_circular_cover(space, sets)
    if fail is not None:
        raise ValueError(f"not a circular covering: {fail}")
    count = len(sets)
    for depth in range(budget + 1):
        got = _try_cycle_partition(space, sets)
        if isinstance(got, BrickPartition):
            if got.nerve == cycle_graph(count):
                return CyclePartition(got, sets, depth)
            fail = "split classes do not form the expected cycle nerve"
        else:
            fail = got
        if depth == budget:
            raise SubdivisionBudgetError(
                "cycle_partition_from_covering", fail, depth)
        sub, parent = space.subdivide()
        sets = tuple(
            frozenset(x for x in range(sub.n) if parent.values[x] in O)
            for O in sets)
        space = sub
    raise AssertionError("unreachable")
