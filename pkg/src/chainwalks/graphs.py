"""Finite connected reflexive graphs and structure-preserving maps.

Vertices are dense integers ``0..n-1``.  Every vertex is implicitly adjacent
to itself; edge lists never store loops.  Instances are immutable and safe to
share.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class Graph:
    """A connected reflexive symmetric graph.

    ``nbrs[v]`` is the sorted tuple of neighbors of ``v``, self excluded.
    Use :meth:`from_edges` to construct with validation; the raw constructor
    is for internal fast paths that already guarantee the invariants.
    """

    nbrs: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n <= 0:
            raise ValueError("graph needs at least one vertex")
        sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                continue
            sets[u].add(v)
            sets[v].add(u)
        g = Graph(tuple(tuple(sorted(s)) for s in sets))
        if not g.is_connected():
            raise ValueError("graph is not connected")
        return g

    @property
    def n(self) -> int:
        return len(self.nbrs)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Undirected edges as (i, j) with i < j, loops omitted."""
        for u, around in enumerate(self.nbrs):
            for v in around:
                if u < v:
                    yield (u, v)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.nbrs) // 2

    def degree(self, v: int) -> int:
        """Number of neighbors, the implicit loop not counted."""
        return len(self.nbrs[v])

    def has_edge(self, u: int, v: int) -> bool:
        """Adjacency in the reflexive sense: every vertex touches itself."""
        return u == v or v in self.nbrs[u]

    def is_connected(self) -> bool:
        return len(self._component(0)) == self.n

    def _component(self, start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def is_connected_subset(self, vertices: Iterable[int]) -> bool:
        """True if the induced subgraph on ``vertices`` is nonempty and connected."""
        vs = set(vertices)
        if not vs:
            return False
        start = next(iter(vs))
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.nbrs[x]:
                if y in vs and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(vs)

    def distances_from(self, sources: int | Iterable[int]) -> list[int]:
        """BFS distance from a vertex or a set of vertices to every vertex."""
        if isinstance(sources, int):
            sources = (sources,)
        dist = [-1] * self.n
        queue: deque[int] = deque()
        for s in sources:
            if dist[s] == -1:
                dist[s] = 0
                queue.append(s)
        while queue:
            x = queue.popleft()
            d = dist[x] + 1
            for y in self.nbrs[x]:
                if dist[y] == -1:
                    dist[y] = d
                    queue.append(y)
        return dist

    def dist(self, u: int, v: int) -> int:
        if u == v:
            return 0
        seen = {u}
        queue = deque([(u, 0)])
        while queue:
            x, d = queue.popleft()
            for y in self.nbrs[x]:
                if y == v:
                    return d + 1
                if y not in seen:
                    seen.add(y)
                    queue.append((y, d + 1))
        raise ValueError("vertices are in different components")

    def ball(self, around: int | Iterable[int], radius: int) -> set[int]:
        """Closed ball: vertices at distance <= radius from the given set."""
        if isinstance(around, int):
            around = (around,)
        current = set(around)
        for _ in range(radius):
            grown = set(current)
            for x in current:
                grown.update(self.nbrs[x])
            if len(grown) == len(current):
                break
            current = grown
        return current

    def closure(self, vertices: Iterable[int]) -> set[int]:
        """The set together with all its neighbors (radius-1 ball)."""
        return self.ball(vertices, 1)

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "edges": [list(e) for e in self.edges()]},
            sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "Graph":
        data = json.loads(text)
        return Graph.from_edges(data["n"], [tuple(e) for e in data["edges"]])

    def to_dot(self, labels: Sequence[str] | None = None) -> str:
        lines = ["graph g {"]
        for v in range(self.n):
            name = labels[v] if labels is not None else str(v)
            lines.append(f'  {v} [label="{name}"];')
        for u, v in self.edges():
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@dataclass(frozen=True)
class GraphMap:
    """A graph homomorphism (edges map to edges; loops make this lax).

    Use :meth:`make` to construct with validation.
    """

    domain: Graph
    codomain: Graph
    values: tuple[int, ...]

    @staticmethod
    def make(domain: Graph, codomain: Graph, values: Sequence[int]) -> "GraphMap":
        vals = tuple(values)
        if len(vals) != domain.n:
            raise ValueError("map must assign every domain vertex")
        for x in vals:
            if not 0 <= x < codomain.n:
                raise ValueError(f"value {x} out of codomain range")
        for u, v in domain.edges():
            if not codomain.has_edge(vals[u], vals[v]):
                raise ValueError(
                    f"edge ({u},{v}) maps to non-edge ({vals[u]},{vals[v]})")
        return GraphMap(domain, codomain, vals)

    @staticmethod
    def identity(g: Graph) -> "GraphMap":
        return GraphMap(g, g, tuple(range(g.n)))

    def __call__(self, v: int) -> int:
        return self.values[v]

    def compose(self, inner: "GraphMap") -> "GraphMap":
        """self after inner."""
        if inner.codomain is not self.domain and inner.codomain != self.domain:
            raise ValueError("maps do not compose")
        return GraphMap(inner.domain, self.codomain,
                        tuple(self.values[x] for x in inner.values))

    def fiber(self, w: int) -> tuple[int, ...]:
        return tuple(x for x, y in enumerate(self.values) if y == w)

    def fibers(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.codomain.n)]
        for x, y in enumerate(self.values):
            out[y].append(x)
        return [tuple(f) for f in out]

    def monotone_epi_defect(self) -> str | None:
        """None if this is a monotone epimorphism, else a short reason.

        Monotone epimorphism: every vertex fiber is nonempty and connected,
        and every codomain edge is the image of some domain edge.
        """
        for w, fib in enumerate(self.fibers()):
            if not fib:
                return f"vertex-fiber-empty:{w}"
            if not self.domain.is_connected_subset(fib):
                return f"vertex-fiber-disconnected:{w}"
        covered = set()
        for u, v in self.domain.edges():
            a, b = self.values[u], self.values[v]
            if a != b:
                covered.add((min(a, b), max(a, b)))
        for e in self.codomain.edges():
            if e not in covered:
                return f"edge-not-covered:{e[0]}-{e[1]}"
        return None

    def is_monotone_epimorphism(self) -> bool:
        return self.monotone_epi_defect() is None

    def sup_distance(self, other: "GraphMap") -> int:
        """Largest codomain distance between images of the same vertex."""
        if self.domain.n != other.domain.n or self.codomain.n != other.codomain.n:
            raise ValueError("maps must share domain and codomain")
        worst = 0
        for x in range(self.domain.n):
            a, b = self.values[x], other.values[x]
            if a != b:
                worst = max(worst, self.codomain.dist(a, b))
        return worst


def enumerate_monotone_epimorphisms(domain: Graph, codomain: Graph) -> Iterator[GraphMap]:
    """All monotone epimorphisms, in lexicographic order of value tuples.

    Backtracking over vertex assignments in index order; prunes partial maps
    that already break the homomorphism condition or cannot reach vertex
    surjectivity with the remaining vertices.
    """
    n, m = domain.n, codomain.n
    values = [-1] * n
    hit_count = [0] * m

    def assign(i: int) -> Iterator[GraphMap]:
        if i == n:
            f = GraphMap(domain, codomain, tuple(values))
            if f.monotone_epi_defect() is None:
                yield f
            return
        missing = sum(1 for c in hit_count if c == 0)
        if missing > n - i:
            return
        for y in range(m):
            ok = True
            for x in domain.nbrs[i]:
                if x < i and not codomain.has_edge(values[x], y):
                    ok = False
                    break
            if not ok:
                continue
            values[i] = y
            hit_count[y] += 1
            yield from assign(i + 1)
            hit_count[y] -= 1
            values[i] = -1

    yield from assign(0)


def canonical_code(g: Graph) -> tuple[int, ...]:
    """Isomorphism-invariant vertex-ordering code.

    Entry i is the adjacency bitmask of the i-th placed vertex against the
    vertices placed before it, maximized lexicographically over orderings.
    Only argmax rows can extend a lexicographic maximum, so the backtracking
    branches exactly on those and stays exact; two graphs share a code iff
    they are isomorphic.  Maximizing keeps prefixes connected, which holds
    the tie branching near the automorphism count.
    """
    n = g.n
    nb = [set(row) for row in g.nbrs]
    best: list[tuple[int, ...]] = []

    def extend(order: list[int], rows: tuple[int, ...], unused: set[int]):
        if best and rows < best[0][:len(rows)]:
            return
        if not unused:
            if not best or rows > best[0]:
                best[:] = [rows]
            return
        scored = sorted(
            ((sum(1 << j for j, u in enumerate(order) if v in nb[u]), v)
             for v in unused), reverse=True)
        high = scored[0][0]
        for row, v in scored:
            if row != high:
                break
            order.append(v)
            unused.discard(v)
            extend(order, rows + (row,), unused)
            unused.add(v)
            order.pop()

    extend([], (), set(range(n)))
    return best[0]


def enumerate_connected_graphs(n: int) -> Iterator[Graph]:
    """Connected reflexive graphs on ``n`` vertices, one per isomorphism class.

    Brute force over edge subsets with canonical-code deduplication, emitted
    in ascending (edge count, code) order of first discovery.  Intended for
    small ``n``; the subset lattice has 2^(n(n-1)/2) points.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen: set[tuple[int, ...]] = set()
    for mask in range(1 << len(pairs)):
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        try:
            g = Graph.from_edges(n, edges)
        except ValueError:
            continue
        code = canonical_code(g)
        if code not in seen:
            seen.add(code)
            yield g
