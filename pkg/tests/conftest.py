"""Shared strategies: random connected graphs, walks, and quotient maps."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from chainwalks.graphs import Graph, GraphMap
from chainwalks.walks import Walk, PLAIN, CIRCULAR, LASSO


@st.composite
def connected_graphs(draw, min_n: int = 1, max_n: int = 7):
    """Random spanning tree plus random extra edges."""
    n = draw(st.integers(min_n, max_n))
    edges = set()
    for i in range(1, n):
        edges.add((draw(st.integers(0, i - 1)), i))
    if n >= 2:
        extras = draw(st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
            max_size=2 * n))
        for u, v in extras:
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


@st.composite
def plain_walks(draw, graph: Graph | None = None, max_len: int = 8,
                min_len: int = 1):
    g = graph if graph is not None else draw(connected_graphs())
    length = draw(st.integers(min_len, max_len))
    vs = [draw(st.integers(0, g.n - 1))]
    while len(vs) < length:
        options = (vs[-1],) + g.nbrs[vs[-1]]
        vs.append(options[draw(st.integers(0, len(options) - 1))])
    return Walk(g, PLAIN, tuple(vs))


def random_walk(g: Graph, rng: random.Random, length: int,
                start: int | None = None) -> Walk:
    vs = [start if start is not None else rng.randrange(g.n)]
    while len(vs) < length:
        vs.append(rng.choice((vs[-1],) + g.nbrs[vs[-1]]))
    return Walk(g, PLAIN, tuple(vs))


@st.composite
def quotient_epis(draw, max_n: int = 7):
    """A random graph with a random fiber-contraction onto its quotient."""
    g = draw(connected_graphs(min_n=2, max_n=max_n))
    k = draw(st.integers(1, g.n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    block_of = carve_blocks(g, k, rng)
    m = max(block_of) + 1
    edges = set()
    for u, v in g.edges():
        a, b = block_of[u], block_of[v]
        if a != b:
            edges.add((min(a, b), max(a, b)))
    h = Graph.from_edges(m, edges)
    return GraphMap.make(g, h, tuple(block_of))


def carve_blocks(g: Graph, blocks: int, rng: random.Random) -> list[int]:
    """Partition vertices into at most ``blocks`` connected pieces.

    Seeds are random vertices; each piece grows by claiming unclaimed
    neighbors, round-robin, so every piece is connected and nonempty.
    """
    blocks = min(blocks, g.n)
    order = list(range(g.n))
    rng.shuffle(order)
    seeds = order[:blocks]
    block_of = [-1] * g.n
    frontiers = []
    for b, s in enumerate(seeds):
        block_of[s] = b
        frontiers.append([s])
    remaining = g.n - blocks
    while remaining:
        progressed = False
        for b in range(blocks):
            grown: list[int] = []
            for x in frontiers[b]:
                for y in g.nbrs[x]:
                    if block_of[y] == -1:
                        block_of[y] = b
                        grown.append(y)
                        remaining -= 1
                        progressed = True
            frontiers[b] = grown or frontiers[b]
        if not progressed:
            # unreachable for connected graphs, but do not loop forever
            for x in range(g.n):
                if block_of[x] == -1:
                    block_of[x] = 0
                    remaining -= 1
    # block ids may be non-dense if a seed never grew; re-densify
    seen: dict[int, int] = {}
    out = []
    for b in block_of:
        if b not in seen:
            seen[b] = len(seen)
        out.append(seen[b])
    return out
