"""Winding numbers of walks relative to a fixed circular reference path.

A circular path C of length l >= 3 assigns every ordered vertex pair a
weight in {-1, 0, +1}: +1 for a forward cycle edge, -1 for a backward one,
0 otherwise.  The winding number of a walk is the sum of the weights of its
stored consecutive pairs, so a circular walk's closing edge counts exactly
once.  Besides the two basic maps this module ships executable forms of the
three transfer facts the rest of the package leans on: invariance under
monotone refinement, the initial-segment transfer along a homomorphism, and
the +-2 bound for pointwise-close confined walks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .graphs import Graph, GraphMap
from .walks import CIRCULAR, PLAIN, Walk, walk_from_json, walk_to_json


@dataclass(frozen=True)
class CircularReference:
    """A circular path used as the measuring cycle for winding numbers."""

    host: Graph
    cycle: Walk
    spaced: bool = False

    def __post_init__(self):
        if self.cycle.graph != self.host:
            raise ValueError("reference cycle must live on the host graph")
        if self.cycle.kind != CIRCULAR or not self.cycle.is_path():
            raise ValueError("reference must be a circular path")
        if self.cycle.length < 3:
            raise ValueError("weights need a cycle of length >= 3")
        if self.spaced and not self.cycle.is_spaced():
            raise ValueError("spaced flag set but the cycle is not spaced")

    @classmethod
    def make(cls, cycle: Walk) -> "CircularReference":
        return cls(cycle.graph, cycle, cycle.is_spaced())

    @property
    def length(self) -> int:
        return self.cycle.length

    @cached_property
    def _pos(self) -> dict[int, int]:
        # body only: the stored closing repeat is not a second occurrence
        return {v: i for i, v in enumerate(self.cycle.vertices[:-1])}

    def body(self) -> frozenset[int]:
        return frozenset(self._pos)

    def confines(self, w: Walk) -> bool:
        return w.vertex_set() <= self.body()

    def weight(self, x: int, y: int) -> int:
        n = self.length
        body = self.cycle.vertices
        i = self._pos.get(x)
        if i is not None and body[(i + 1) % n] == y:
            return 1
        j = self._pos.get(y)
        if j is not None and body[(j + 1) % n] == x:
            return -1
        return 0

    def to_json(self) -> str:
        data = json.loads(walk_to_json(self.cycle))
        data["role"] = "reference"
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "CircularReference":
        data = json.loads(text)
        if data.get("role") != "reference":
            raise ValueError("not a reference-cycle record")
        data.pop("role")
        return cls.make(walk_from_json(json.dumps(data)))


def weight(c: CircularReference, x: int, y: int) -> int:
    if not (0 <= x < c.host.n and 0 <= y < c.host.n):
        raise ValueError("vertex outside the host graph")
    return c.weight(x, y)


def winding_number(c: CircularReference, w: Walk) -> int:
    if w.graph != c.host:
        raise ValueError("walk and reference live on different graphs")
    vs = w.vertices
    return sum(c.weight(vs[i], vs[i + 1]) for i in range(len(vs) - 1))


def prefix_windings(c: CircularReference, w: Walk) -> tuple[int, ...]:
    """Winding numbers of all stored prefixes; entry i covers w(0..i)."""
    if w.graph != c.host:
        raise ValueError("walk and reference live on different graphs")
    vs = w.vertices
    out = []
    acc = 0
    for i, v in enumerate(vs):
        if i:
            acc += c.weight(vs[i - 1], v)
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class WindingAgreement:
    finer: int
    coarser: int


def check_monotone_invariance(c: CircularReference, w: Walk,
                              v: Walk) -> WindingAgreement:
    """Verify that a monotone refinement leaves the winding number fixed."""
    if w.monotone_witness(v) is None:
        raise ValueError("w does not monotonically refine v")
    a = winding_number(c, w)
    b = winding_number(c, v)
    if a != b:
        raise AssertionError(
            f"monotone refinement changed the winding number: {a} != {b}")
    return WindingAgreement(a, b)


def initial_segment_winding(c: CircularReference, spaced_path: Walk,
                            z: Walk, alpha: Optional[GraphMap] = None) -> int:
    """Winding of the straight initial segment that z wanders over.

    ``spaced_path`` and ``z`` live on a common graph; ``alpha`` maps that
    graph into the reference host (identity when omitted).  ``z`` must
    refine and stay inside an initial segment of ``spaced_path``.  Returns
    the winding number of the image of ``<w(0), ..., w(j)>`` where
    ``w(j)`` is z's final vertex, after checking it matches the winding
    of z's image.
    """
    w = spaced_path
    if z.graph != w.graph:
        raise ValueError("walks live on different graphs")
    if w.kind != PLAIN or not (w.is_path() and w.is_spaced()):
        raise ValueError("reference walk must be a plain spaced path")
    if alpha is None:
        if w.graph != c.host:
            raise ValueError("walks are not on the host; pass alpha")
        alpha = GraphMap.identity(c.host)
    elif alpha.domain != w.graph or alpha.codomain != c.host:
        raise ValueError("alpha must map the walks' graph into the host")
    fv = z.first_visits()
    if not fv or fv != w.vertices[:len(fv)]:
        raise ValueError(
            "z does not refine an initial segment of the spaced path")
    if not z.vertex_set() <= set(fv):
        raise ValueError(
            "z is not confined to the initial segment it refines")
    j = w.vertices.index(z.vertices[-1])
    segment = Walk(w.graph, PLAIN, w.vertices[:j + 1]).induce(alpha)
    got = winding_number(c, z.induce(alpha))
    want = winding_number(c, segment)
    if got != want:
        raise AssertionError(
            f"initial-segment transfer failed: {got} != {want}")
    return want


@dataclass(frozen=True)
class CloseWalksVerdict:
    wind_first: int
    wind_second: int
    difference: int
    head_weight: int
    tail_weight: int


def close_walks_bound(c: CircularReference, z: Walk,
                      z2: Walk) -> CloseWalksVerdict:
    """Exact winding decomposition for two pointwise-close confined walks.

    Requires a spaced reference of length >= 4, equal-length plain walks
    confined to the cycle with d(z(i), z2(i)) <= 1 and the staggered
    condition d(z2(i), z(i+1)) <= 1.  The difference then telescopes to
    the two seam weights, so it is at most 2 in absolute value.
    """
    if not c.spaced or c.length < 4:
        raise ValueError("close-walks bound needs a spaced cycle, length >= 4")
    if z.kind != PLAIN or z2.kind != PLAIN:
        raise ValueError("close-walks bound compares plain walks")
    if z.graph != c.host or z2.graph != c.host:
        raise ValueError("walks must live on the host graph")
    if len(z.vertices) != len(z2.vertices) or not z.vertices:
        raise ValueError("walks must share the same positive length")
    if not (c.confines(z) and c.confines(z2)):
        raise ValueError("walks must be confined to the reference cycle")
    g = c.host
    k = len(z.vertices)
    for i in range(k):
        if g.dist(z.vertices[i], z2.vertices[i]) > 1:
            raise ValueError(f"walks drift apart at position {i}")
        if i + 1 < k and g.dist(z2.vertices[i], z.vertices[i + 1]) > 1:
            raise ValueError(f"staggered closeness fails at position {i}")
    a = winding_number(c, z)
    b = winding_number(c, z2)
    head = c.weight(z2.vertices[0], z.vertices[0])
    tail = c.weight(z.vertices[-1], z2.vertices[-1])
    if b != head + a + tail:
        raise AssertionError("seam decomposition of the difference failed")
    if abs(b - a) > 2:
        raise AssertionError("close walks differ in winding by more than 2")
    return CloseWalksVerdict(a, b, b - a, head, tail)
