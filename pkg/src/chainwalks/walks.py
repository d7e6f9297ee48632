"""Walks on reflexive graphs: taxonomy, refinement orders, constructive lifts.

Storage conventions
-------------------
* A walk stores its full vertex sequence.  Consecutive entries must be equal
  or adjacent (the graphs are reflexive, so staying put is a legal step).
* ``kind`` is one of ``"plain"``, ``"circular"``, ``"lasso"``.
* Circular walks store the closing repeat (``vertices[0] == vertices[-1]``)
  and report ``length`` as one less than the stored length: the circular walk
  ``<a, b, c, a>`` has length 3.  Index arithmetic for circular predicates
  reads positions modulo that length.
* A lasso is a tail walk followed by a circular walk: ``split`` is the tail
  length, entries ``[split:]`` form the stored circular part.  ``split == 0``
  (empty tail) is allowed.
* The empty plain walk is allowed and has length 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .graphs import Graph, GraphMap

PLAIN = "plain"
CIRCULAR = "circular"
LASSO = "lasso"


@dataclass(frozen=True)
class Walk:
    graph: Graph
    kind: str
    vertices: tuple[int, ...]
    split: Optional[int] = None

    def __post_init__(self):
        vs = self.vertices
        g = self.graph
        for x in vs:
            if not 0 <= x < g.n:
                raise ValueError(f"vertex {x} out of range")
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                raise ValueError(f"({a},{b}) is not a step")
        if self.kind == PLAIN:
            if self.split is not None:
                raise ValueError("plain walks have no split")
        elif self.kind == CIRCULAR:
            if self.split is not None:
                raise ValueError("circular walks have no split")
            if len(vs) < 2:
                raise ValueError("a circular walk stores its closing repeat")
            if vs[0] != vs[-1]:
                raise ValueError("circular walk must close up")
        elif self.kind == LASSO:
            s = self.split
            if s is None or not 0 <= s <= len(vs) - 2:
                raise ValueError("lasso needs 0 <= split <= len-2")
            if vs[s] != vs[-1]:
                raise ValueError("lasso cycle part must close up")
        else:
            raise ValueError(f"unknown walk kind {self.kind!r}")

    # --- basic views -----------------------------------------------------

    @property
    def length(self) -> int:
        """Walk length; for circular walks the closing repeat is not counted."""
        if self.kind == CIRCULAR:
            return len(self.vertices) - 1
        return len(self.vertices)

    def at(self, i: int) -> int:
        """w(i); for circular walks indices are read modulo the length.

        ``at(-1)`` is the last element in the walk sense: for a circular walk
        that is the entry before the closing repeat.
        """
        n = self.length
        if n == 0:
            raise IndexError("empty walk")
        if self.kind == CIRCULAR:
            return self.vertices[i % n]
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError("walk index out of range")
        return self.vertices[i]

    def tail_part(self) -> "Walk":
        if self.kind != LASSO:
            raise ValueError("not a lasso")
        return Walk(self.graph, PLAIN, self.vertices[:self.split])

    def cycle_part(self) -> "Walk":
        if self.kind != LASSO:
            raise ValueError("not a lasso")
        return Walk(self.graph, CIRCULAR, self.vertices[self.split:])

    def first_visits(self) -> tuple[int, ...]:
        """Distinct vertices in order of first appearance."""
        seen: set[int] = set()
        out: list[int] = []
        for x in self.vertices:
            if x not in seen:
                seen.add(x)
                out.append(x)
        return tuple(out)

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    # --- predicates ------------------------------------------------------

    def is_reduced(self) -> bool:
        return all(a != b for a, b in zip(self.vertices, self.vertices[1:]))

    def is_uncrossed(self) -> bool:
        """Each vertex always steps to the same successor.

        Checked on the stored sequence, so circular closings and lasso seams
        participate; the final entry has no successor and never obstructs.
        """
        succ: dict[int, int] = {}
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a in succ:
                if succ[a] != b:
                    return False
            else:
                succ[a] = b
        return True

    def is_path(self) -> bool:
        """Injectivity, per kind.

        Plain: all entries distinct.  Circular: distinct up to the closing
        repeat.  Lasso: tail and cycle part are paths and are disjoint.
        """
        if self.kind == PLAIN:
            return len(set(self.vertices)) == len(self.vertices)
        if self.kind == CIRCULAR:
            body = self.vertices[:-1]
            return len(set(body)) == len(body)
        tail = self.vertices[:self.split]
        body = self.vertices[self.split:-1]
        return (len(set(tail)) == len(tail)
                and len(set(body)) == len(body)
                and not set(tail) & set(body))

    def is_spaced(self) -> bool:
        """Spaced path: adjacency between entries iff positions are within 1.

        For circular walks positions are compared cyclically; for lassos each
        part must be spaced on its own (and the parts disjoint, via is_path).
        """
        if not self.is_path():
            return False
        if self.kind == LASSO:
            return self.tail_part().is_spaced() and self.cycle_part().is_spaced()
        n = self.length
        body = self.vertices[:n]
        for i in range(n):
            for j in range(i + 1, n):
                gap = j - i
                if self.kind == CIRCULAR:
                    gap = min(gap, n - gap)
                if self.graph.has_edge(body[i], body[j]) != (gap <= 1):
                    return False
        return True

    def classify(self) -> frozenset[str]:
        flags = set()
        if self.is_reduced():
            flags.add("reduced")
        if self.is_uncrossed():
            flags.add("uncrossed")
        if self.is_path():
            flags.add("path")
        if self.is_spaced():
            flags.add("spaced_path")
        return frozenset(flags)

    # --- rewriting -------------------------------------------------------

    def reduce(self) -> "Walk":
        """Collapse consecutive repeats.  Kind and split structure survive.

        A circular walk can collapse at most to the constant loop ``<a, a>``,
        which stays unreduced by definition.  A lasso whose tail melts into
        the cycle start keeps kind ``lasso`` with a shorter (possibly empty)
        tail.
        """
        if self.kind == LASSO:
            tail = _collapse(self.vertices[:self.split])
            body = _collapse(self.vertices[self.split:])
            if len(body) == 1:
                body = body + body
            while tail and tail[-1] == body[0]:
                tail = tail[:-1]
            return Walk(self.graph, LASSO, tail + body, split=len(tail))
        collapsed = _collapse(self.vertices)
        if self.kind == CIRCULAR and len(collapsed) == 1:
            collapsed = collapsed + collapsed
        return Walk(self.graph, self.kind, collapsed, split=None)

    def reverse(self) -> "Walk":
        if self.kind == PLAIN:
            return Walk(self.graph, PLAIN, self.vertices[::-1])
        if self.kind == CIRCULAR:
            return Walk(self.graph, CIRCULAR, self.vertices[::-1])
        raise ValueError("reversal of a lasso is not defined")

    def rotate(self, k: int) -> "Walk":
        """Circular walk starting k steps later around the same cycle."""
        if self.kind != CIRCULAR:
            raise ValueError("only circular walks rotate")
        n = self.length
        k %= n
        body = self.vertices[:-1]
        moved = body[k:] + body[:k]
        return Walk(self.graph, CIRCULAR, moved + (moved[0],))

    def power(self, k: int) -> "Walk":
        """The circular walk that goes around this one k times."""
        if self.kind != CIRCULAR:
            raise ValueError("only circular walks have powers")
        if k < 1:
            raise ValueError("need k >= 1")
        body = self.vertices[:-1]
        return Walk(self.graph, CIRCULAR, body * k + (body[0],))

    def as_plain(self) -> "Walk":
        """The same vertex sequence forgetting circular/lasso structure."""
        return Walk(self.graph, PLAIN, self.vertices)

    def induce(self, f: GraphMap) -> "Walk":
        """The image walk under a homomorphism; kind and split carry over."""
        if f.domain.n != self.graph.n:
            raise ValueError("walk does not live in the map's domain")
        return Walk(f.codomain, self.kind,
                    tuple(f.values[x] for x in self.vertices), self.split)

    # --- refinement orders ----------------------------------------------

    def refines(self, coarser: "Walk") -> bool:
        """True if every prefix vertex-set of ``coarser`` is one of ours.

        Equivalent formulation used here: the first-visit sequence of
        ``coarser`` is a prefix of ours.
        """
        if self.graph.n != coarser.graph.n:
            raise ValueError("walks live on different graphs")
        mine = self.first_visits()
        theirs = coarser.first_visits()
        return mine[:len(theirs)] == theirs

    def monotone_refines(self, coarser: "Walk") -> bool:
        return self.monotone_witness(coarser) is not None

    def monotone_witness(self, coarser: "Walk") -> Optional[tuple[int, ...]]:
        """Least index map showing this walk is a stuttering of ``coarser``.

        Returns f with f(0) = 0, strictly increasing, such that our entries
        on [f(j), f(j+1)) all equal coarser(j) and the final run sticks to
        coarser's last vertex; None if no such map exists.  When both walks
        are lassos the parts must stutter separately and each part must be
        confined to the corresponding part of ``coarser``.
        """
        if self.graph.n != coarser.graph.n:
            raise ValueError("walks live on different graphs")
        if self.kind == LASSO and coarser.kind == LASSO:
            if not (set(self.vertices[:self.split])
                    <= set(coarser.vertices[:coarser.split])):
                return None
            if not (set(self.vertices[self.split:])
                    <= set(coarser.vertices[coarser.split:])):
                return None
            f_tail = _stutter_witness(self.vertices[:self.split],
                                      coarser.vertices[:coarser.split])
            f_body = _stutter_witness(self.vertices[self.split:],
                                      coarser.vertices[coarser.split:])
            if f_tail is None or f_body is None:
                return None
            return f_tail + tuple(self.split + i for i in f_body)
        if self.kind == LASSO or coarser.kind == LASSO:
            return None
        return _stutter_witness(self.vertices, coarser.vertices)


def _collapse(vs: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for x in vs:
        if not out or out[-1] != x:
            out.append(x)
    return tuple(out)


def _runs(vs: Sequence[int]) -> list[tuple[int, int]]:
    """(value, run length) pairs."""
    out: list[tuple[int, int]] = []
    for x in vs:
        if out and out[-1][0] == x:
            out[-1] = (x, out[-1][1] + 1)
        else:
            out.append((x, 1))
    return out


def _stutter_witness(long: Sequence[int], short: Sequence[int]
                     ) -> Optional[tuple[int, ...]]:
    """Least strictly increasing f with long constant = short(j) on [f(j), f(j+1))."""
    if len(short) == 0:
        return () if len(long) == 0 else None
    if len(long) < len(short):
        return None
    lr, sr = _runs(long), _runs(short)
    if len(lr) != len(sr) or any(a[0] != b[0] for a, b in zip(lr, sr)):
        return None
    if any(a[1] < b[1] for a, b in zip(lr, sr)):
        return None
    f: list[int] = []
    pos = 0
    for (_, llen), (_, slen) in zip(lr, sr):
        f.extend(range(pos, pos + slen))
        pos += llen
    return tuple(f)


# --- spec-shaped module surface -------------------------------------------

def classify(w: Walk) -> frozenset[str]:
    return w.classify()


def refines(w: Walk, v: Walk) -> bool:
    return w.refines(v)


def monotonically_refines(w: Walk, v: Walk) -> Optional[tuple[int, ...]]:
    return w.monotone_witness(v)


def induce(f: GraphMap, w: Walk) -> Walk:
    return w.induce(f)


def reduce_walk(w: Walk) -> Walk:
    return w.reduce()


def concat(w: Walk, v: Walk) -> Walk:
    """w followed by v.  The seam must be a legal step (equality counts).

    A circular second argument turns the result into a lasso whose split is
    the length of w; two plain walks concatenate to a plain walk.  An empty w
    returns v unchanged.
    """
    if w.kind != PLAIN:
        raise ValueError("can only extend a plain walk")
    if not w.vertices:
        return v
    if v.kind == LASSO:
        raise ValueError("cannot append a lasso")
    if not v.vertices:
        return w
    if not w.graph.has_edge(w.vertices[-1], v.vertices[0]):
        raise ValueError("walk ends are not adjacent")
    if v.kind == CIRCULAR:
        return Walk(w.graph, LASSO, w.vertices + v.vertices,
                    split=len(w.vertices))
    return Walk(w.graph, PLAIN, w.vertices + v.vertices)


# --- construction helpers ------------------------------------------------

def plain_walk(g: Graph, vertices: Iterable[int]) -> Walk:
    return Walk(g, PLAIN, tuple(vertices))


def circular_walk(g: Graph, body: Iterable[int]) -> Walk:
    """Circular walk from the distinct entries; the closing repeat is added."""
    b = tuple(body)
    return Walk(g, CIRCULAR, b + (b[0],))


def lasso_walk(g: Graph, tail: Iterable[int], cycle_body: Iterable[int]) -> Walk:
    t, c = tuple(tail), tuple(cycle_body)
    return Walk(g, LASSO, t + c + (c[0],), split=len(t))


def walk_to_json(w: Walk) -> str:
    return json.dumps({
        "graph": {"n": w.graph.n, "edges": [list(e) for e in w.graph.edges()]},
        "kind": w.kind,
        "split": w.split,
        "vertices": list(w.vertices),
    }, sort_keys=True, separators=(",", ":"))


def walk_from_json(text: str) -> Walk:
    data = json.loads(text)
    g = Graph.from_edges(data["graph"]["n"],
                         [tuple(e) for e in data["graph"]["edges"]])
    return Walk(g, data["kind"], tuple(data["vertices"]), data["split"])


# --- constructive lift ---------------------------------------------------

def bfs_path(g: Graph, start: int, targets: set[int], allowed: set[int]
             ) -> list[int]:
    """Deterministic shortest path from ``start`` into ``targets``.

    Interior vertices stay in ``allowed`` and never touch ``targets``; among
    nearest targets the smallest wins, and parents are first-discoverers
    under ascending neighbor order, so the result is reproducible.
    """
    if start in targets:
        return [start]
    parent = {start: -1}
    frontier = [start]
    while frontier:
        found: list[int] = []
        nxt: list[int] = []
        for x in frontier:
            for y in g.nbrs[x]:
                if y in parent:
                    continue
                if y in targets:
                    parent[y] = x
                    found.append(y)
                elif y in allowed:
                    parent[y] = x
                    nxt.append(y)
        if found:
            best = min(found)
            path = [best]
            while parent[path[-1]] != -1:
                path.append(parent[path[-1]])
            path.reverse()
            return path
        frontier = nxt
    raise ValueError("no path to targets through allowed region")


def lift_walk(f: GraphMap, w: Walk) -> Walk:
    """Lift a reduced walk through a monotone epimorphism.

    Returns a reduced walk v on the domain, of the same kind as w, whose
    image walk ``v.induce(f)`` monotonically refines w (with the per-part
    confinement condition when w is a lasso).  The lift of a plain or
    circular path is again a path; for lasso paths this holds whenever the
    seam fiber admits it, which is not always the case.
    """
    if w.graph.n != f.codomain.n:
        raise ValueError("walk does not live in the map's codomain")
    if not w.is_reduced():
        raise ValueError("lift needs a reduced walk")
    defect = f.monotone_epi_defect()
    if defect is not None:
        raise ValueError(f"not a monotone epimorphism ({defect})")
    if not w.vertices:
        return Walk(f.domain, PLAIN, ())
    fibers = [set(fib) for fib in f.fibers()]
    g = f.domain

    if w.kind == PLAIN:
        vs = _lift_sequence(g, fibers, w.vertices, None)
        out = Walk(g, PLAIN, tuple(vs))
    elif w.kind == CIRCULAR:
        vs = _lift_circular(g, fibers, w.vertices, None)
        out = Walk(g, CIRCULAR, tuple(vs))
    else:
        tail = w.vertices[:w.split]
        body = w.vertices[w.split:]
        if tail:
            tail_vs = _lift_sequence(g, fibers, tail, None)
            c_first, c_last = body[0], body[-2]
            sees_last = {x for x in fibers[c_first]
                         if any(y in fibers[c_last] for y in g.nbrs[x])}
            try:
                seam = bfs_path(g, tail_vs[-1], sees_last, fibers[tail[-1]])
            except ValueError:
                seam = bfs_path(g, tail_vs[-1], fibers[c_first],
                                fibers[tail[-1]])
            entry = seam[-1]
            circ = _lift_circular(g, fibers, body, entry)
            tail_full = tail_vs + seam[1:-1]
            out = Walk(g, LASSO, tuple(tail_full) + tuple(circ),
                       split=len(tail_full))
        else:
            circ = _lift_circular(g, fibers, body, None)
            out = Walk(g, LASSO, tuple(circ), split=0)
    out = out.reduce()
    image = out.induce(f)
    if image.monotone_witness(w) is None:
        raise AssertionError("lift postcondition failed")
    return out


def _lift_sequence(g: Graph, fibers: list[set[int]],
                   codomain_vs: tuple[int, ...], start: int | None) -> list[int]:
    """Chain of fiber-to-fiber shortest paths through consecutive fibers."""
    vs = [start if start is not None else min(fibers[codomain_vs[0]])]
    for a, b in zip(codomain_vs, codomain_vs[1:]):
        seg = bfs_path(g, vs[-1], fibers[b], fibers[a])
        vs.extend(seg[1:])
    return vs


def _lift_circular(g: Graph, fibers: list[set[int]],
                   stored: tuple[int, ...], anchor: int | None) -> list[int]:
    """Lift of a reduced circular walk, closing at ``anchor`` when given.

    Without an anchor the start is the smallest first-fiber vertex that sees
    the last fiber, which a monotone epimorphism always provides; the closing
    path then runs inside the last fiber.  An anchored start may not see the
    last fiber, in which case the closing walks through the last fiber to a
    crossing vertex and then inside the entry fiber back to the anchor.
    """
    body = stored[:-1]
    first_fiber, last_fiber = fibers[body[0]], fibers[body[-1]]
    if anchor is None:
        start = min(x for x in first_fiber
                    if any(y in last_fiber for y in g.nbrs[x]))
    else:
        start = anchor
    vs = _lift_sequence(g, fibers, body, start)
    try:
        closing = bfs_path(g, vs[-1], {start}, last_fiber)
        vs.extend(closing[1:])
    except ValueError:
        # the anchor cannot be reached from inside the last fiber; come home
        # through the entry fiber, stuttering its image value once more
        crossing = {x for x in first_fiber
                    if any(y in last_fiber for y in g.nbrs[x])}
        leg1 = bfs_path(g, vs[-1], crossing, last_fiber)
        leg2 = bfs_path(g, leg1[-1], {start}, first_fiber)
        vs.extend(leg1[1:])
        vs.extend(leg2[1:])
    return vs


def enumerate_reduced_walks(g: Graph, max_len: int) -> Iterator[Walk]:
    """All reduced walks on ``g`` with ``Walk.length`` at most ``max_len``.

    Labeled enumeration (no isomorphism folding), deterministic order: plain
    walks, then circular, then lasso, each by length and lexicographic
    vertices.  Lasso tails may be empty; every emitted walk passes the Walk
    validator and is_reduced.
    """
    if max_len < 1:
        return

    def chains(first: int, steps: int) -> Iterator[tuple[int, ...]]:
        """Reduced vertex chains of the given step count starting at first."""
        if steps == 0:
            yield (first,)
            return
        for nxt in g.nbrs[first]:
            for rest in chains(nxt, steps - 1):
                yield (first,) + rest

    for steps in range(max_len):
        for start in range(g.n):
            for vs in chains(start, steps):
                yield Walk(g, PLAIN, vs)

    # circular: stored = body + closing repeat, reported length = len(body);
    # the wrap step must also be a reduced step.
    for blen in range(2, max_len):
        for start in range(g.n):
            for vs in chains(start, blen - 1):
                if vs[-1] != vs[0] and g.has_edge(vs[-1], vs[0]):
                    yield Walk(g, CIRCULAR, vs + (vs[0],))

    # lasso: stored = tail + body + closing repeat; Walk.length counts the
    # stored entries, so tail + body lengths are bounded by max_len - 1.
    for tlen in range(0, max_len - 2):
        for blen in range(2, max_len - tlen):
            if tlen + blen + 1 > max_len:
                continue
            tails = ([()] if tlen == 0 else
                     [t for s in range(g.n) for t in chains(s, tlen - 1)])
            for tail in tails:
                for start in range(g.n):
                    for body in chains(start, blen - 1):
                        if body[-1] == body[0] or not g.has_edge(body[-1], body[0]):
                            continue
                        if tail and (not g.has_edge(tail[-1], body[0])
                                     or tail[-1] == body[0]):
                            continue
                        yield Walk(g, LASSO, tail + body + (body[0],),
                                   split=tlen)
