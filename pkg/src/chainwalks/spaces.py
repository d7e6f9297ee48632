"""Discrete space models and brick partitions.

A space model is a finite "fine" graph from a fixed family (path, cycle,
king-move torus, 26-neighbor box, Sierpinski carpet), each of which can be
subdivided: the finer model comes with the canonical block-collapse map,
always a monotone epimorphism.  A brick partition splits the fine vertices
into connected blocks; its nerve joins two blocks when their discrete
closures (block plus fine neighbors) intersect.  That closure rule makes
corner-touching blocks adjacent even without a crossing edge, which is why
the grid families use king-move adjacency.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .graphs import Graph, GraphMap, cycle_graph, path_graph

FAMILIES = ("interval", "cycle", "torus_grid", "grid3d", "carpet")


def _carpet_cells(level: int) -> list[tuple[int, int]]:
    side = 3 ** level
    cells = []
    for i in range(side):
        for j in range(side):
            a, b, ok = i, j, True
            for _ in range(level):
                if a % 3 == 1 and b % 3 == 1:
                    ok = False
                    break
                a //= 3
                b //= 3
            if ok:
                cells.append((i, j))
    return cells


@dataclass(frozen=True)
class SpaceModel:
    family: str
    params: tuple[int, ...]
    level: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if any(p < 1 for p in self.params):
            raise ValueError("family parameters must be positive")
        arity = {"interval": 1, "cycle": 1, "torus_grid": 2,
                 "grid3d": 3, "carpet": 1}[self.family]
        if len(self.params) != arity:
            raise ValueError(f"{self.family} takes {arity} parameter(s)")
        if self.family == "cycle" and self.params[0] < 3:
            raise ValueError("cycle needs at least 3 vertices")
        if self.family == "torus_grid" and min(self.params) < 3:
            raise ValueError("torus_grid wraps; needs both sides >= 3")

    @classmethod
    def interval(cls, n: int) -> "SpaceModel":
        return cls("interval", (n,))

    @classmethod
    def cycle(cls, n: int) -> "SpaceModel":
        return cls("cycle", (n,))

    @classmethod
    def torus_grid(cls, n: int, m: int) -> "SpaceModel":
        return cls("torus_grid", (n, m))

    @classmethod
    def grid3d(cls, n: int, m: int, p: int) -> "SpaceModel":
        return cls("grid3d", (n, m, p))

    @classmethod
    def carpet(cls, level: int) -> "SpaceModel":
        return cls("carpet", (level,))

    @cached_property
    def _carpet_index(self) -> dict[tuple[int, int], int]:
        return {c: i for i, c in enumerate(_carpet_cells(self.params[0]))}

    @cached_property
    def fine(self) -> Graph:
        f, p = self.family, self.params
        if f == "interval":
            return path_graph(p[0])
        if f == "cycle":
            return cycle_graph(p[0])
        if f == "torus_grid":
            n, m = p
            edges = []
            for i in range(n):
                for j in range(m):
                    for di, dj in ((0, 1), (1, -1), (1, 0), (1, 1)):
                        u = i * m + j
                        v = ((i + di) % n) * m + (j + dj) % m
                        edges.append((u, v))
            return Graph.from_edges(n * m, edges)
        if f == "grid3d":
            n, m, q = p
            edges = []
            for i in range(n):
                for j in range(m):
                    for k in range(q):
                        for di in (-1, 0, 1):
                            for dj in (-1, 0, 1):
                                for dk in (-1, 0, 1):
                                    a, b, c = i + di, j + dj, k + dk
                                    if (di, dj, dk) == (0, 0, 0):
                                        continue
                                    if 0 <= a < n and 0 <= b < m \
                                            and 0 <= c < q:
                                        edges.append(
                                            ((i * m + j) * q + k,
                                             (a * m + b) * q + c))
            return Graph.from_edges(n * m * q, edges)
        cells = _carpet_cells(p[0])
        index = self._carpet_index
        edges = []
        for i, j in cells:
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if (di, dj) == (0, 0):
                        continue
                    other = index.get((i + di, j + dj))
                    if other is not None:
                        edges.append((index[(i, j)], other))
        return Graph.from_edges(len(cells), edges)

    @property
    def n(self) -> int:
        return self.fine.n

    def coord_of(self, v: int) -> tuple[int, ...]:
        f, p = self.family, self.params
        if f in ("interval", "cycle"):
            return (v,)
        if f == "torus_grid":
            return divmod(v, p[1])
        if f == "grid3d":
            ij, k = divmod(v, p[2])
            i, j = divmod(ij, p[1])
            return (i, j, k)
        return _carpet_cells(p[0])[v]

    def vertex_at(self, coord: Sequence[int]) -> int:
        f, p = self.family, self.params
        if f in ("interval", "cycle"):
            return coord[0]
        if f == "torus_grid":
            return coord[0] * p[1] + coord[1]
        if f == "grid3d":
            return (coord[0] * p[1] + coord[1]) * p[2] + coord[2]
        return self._carpet_index[tuple(coord)]

    def subdivide(self) -> tuple["SpaceModel", GraphMap]:
        """The 3-fold refinement and its block-collapse map (an epi)."""
        f, p = self.family, self.params
        if f == "carpet":
            sub = SpaceModel(f, (p[0] + 1,), self.level + 1)
        else:
            sub = SpaceModel(f, tuple(3 * x for x in p), self.level + 1)
        parent = tuple(
            self.vertex_at([c // 3 for c in sub.coord_of(v)])
            for v in range(sub.n))
        return sub, GraphMap.make(sub.fine, self.fine, parent)

    def to_json(self) -> str:
        return json.dumps(self._record(), sort_keys=True,
                          separators=(",", ":"))

    def _record(self) -> dict:
        return {"family": self.family, "params": list(self.params),
                "level": self.level}

    @classmethod
    def from_json(cls, text: str) -> "SpaceModel":
        return cls._from_record(json.loads(text))

    @classmethod
    def _from_record(cls, data: dict) -> "SpaceModel":
        return cls(data["family"], tuple(data["params"]),
                   data.get("level", 0))


@dataclass(frozen=True)
class BrickPartition:
    """Partition of a space's fine vertices into connected blocks."""

    space: SpaceModel
    block_of: tuple[int, ...]

    def __post_init__(self):
        g = self.space.fine
        if len(self.block_of) != g.n:
            raise ValueError("partition must label every fine vertex")
        b = max(self.block_of) + 1 if self.block_of else 0
        members: list[list[int]] = [[] for _ in range(b)]
        for v, i in enumerate(self.block_of):
            if not 0 <= i < b:
                raise ValueError("block ids must be dense from 0")
            members[i].append(v)
        for i, vs in enumerate(members):
            if not vs:
                raise ValueError(f"block {i} is empty")
            if not g.is_connected_subset(set(vs)):
                raise ValueError(f"block {i} is not connected")

    @classmethod
    def trivial(cls, space: SpaceModel) -> "BrickPartition":
        return cls(space, (0,) * space.n)

    @classmethod
    def singletons(cls, space: SpaceModel) -> "BrickPartition":
        return cls(space, tuple(range(space.n)))

    @classmethod
    def from_blocks(cls, space: SpaceModel,
                    blocks: Iterable[Iterable[int]]) -> "BrickPartition":
        label = [-1] * space.n
        for i, vs in enumerate(blocks):
            for v in vs:
                if label[v] != -1:
                    raise ValueError(f"vertex {v} assigned twice")
                label[v] = i
        if -1 in label:
            raise ValueError("blocks do not cover the space")
        return cls(space, tuple(label))

    @property
    def size(self) -> int:
        return max(self.block_of) + 1

    @cached_property
    def blocks(self) -> tuple[frozenset[int], ...]:
        members: list[set[int]] = [set() for _ in range(self.size)]
        for v, i in enumerate(self.block_of):
            members[i].add(v)
        return tuple(frozenset(m) for m in members)

    @cached_property
    def nerve(self) -> Graph:
        """Blocks are adjacent when their discrete closures intersect:
        a crossing fine edge, or a fine vertex adjacent to both."""
        g = self.space.fine
        pairs = set()
        for x in range(g.n):
            seen = {self.block_of[x]}
            seen.update(self.block_of[y] for y in g.nbrs[x])
            lst = sorted(seen)
            for i in range(len(lst)):
                for j in range(i + 1, len(lst)):
                    pairs.add((lst[i], lst[j]))
        return Graph.from_edges(self.size, pairs)

    @cached_property
    def projection(self) -> GraphMap:
        """Fine vertex to its block; a homomorphism, not always an epi."""
        return GraphMap.make(self.space.fine, self.nerve, self.block_of)

    def star(self, c: Iterable[int]) -> frozenset[int]:
        """Blocks whose closure meets c."""
        cs = set(c)
        if not cs:
            raise ValueError("star of an empty set")
        reach = self.space.fine.closure(cs)
        return frozenset(self.block_of[x] for x in reach)

    def core(self, v: Iterable[int]) -> frozenset[int]:
        """Blocks whose closure lies inside v."""
        vs = set(v)
        g = self.space.fine
        return frozenset(i for i, blk in enumerate(self.blocks)
                         if g.closure(blk) <= vs)

    def blocks_inside(self, v: Iterable[int]) -> frozenset[int]:
        vs = set(v)
        return frozenset(i for i, blk in enumerate(self.blocks)
                         if blk <= vs)

    def boundary(self, v: Iterable[int]) -> frozenset[int]:
        vs = set(v)
        return frozenset(self.space.fine.closure(vs) - vs)

    def amalgam(self, grouping: Sequence[Iterable[int]]) -> "BrickPartition":
        """Merge blocks classwise.  Classes must produce connected unions;
        nerve-connectedness alone is not enough in the discrete model,
        because closure adjacency does not always carry a crossing edge."""
        cls_of = [-1] * self.size
        for c, members in enumerate(grouping):
            for b in members:
                if cls_of[b] != -1:
                    raise ValueError(f"block {b} grouped twice")
                cls_of[b] = c
        if -1 in cls_of:
            raise ValueError("grouping must cover every block")
        label = tuple(cls_of[self.block_of[v]] for v in range(self.space.n))
        try:
            return BrickPartition(self.space, label)
        except ValueError as e:
            raise ValueError(f"amalgam class is not connected: {e}") from e

    def pull_back(self, sub: SpaceModel, parent: GraphMap) -> "BrickPartition":
        """The same blocks re-read on a subdivided space."""
        if parent.codomain != self.space.fine or parent.domain != sub.fine:
            raise ValueError("parent map does not match the spaces")
        return BrickPartition(
            sub, tuple(self.block_of[parent(v)] for v in range(sub.n)))

    def to_json(self) -> str:
        return json.dumps(
            {"space": self.space._record(), "block_of": list(self.block_of)},
            sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "BrickPartition":
        data = json.loads(text)
        return cls(SpaceModel._from_record(data["space"]),
                   tuple(data["block_of"]))


@dataclass(frozen=True)
class RefinementMap:
    """Block-level collapse of a finer partition onto a coarser one."""

    finer: BrickPartition
    coarser: BrickPartition
    assignment: GraphMap

    def __call__(self, block: int) -> int:
        return self.assignment(block)


def refinement_map(fine_p: BrickPartition,
                   coarse_p: BrickPartition) -> RefinementMap:
    if fine_p.space != coarse_p.space:
        raise ValueError("partitions live on different spaces")
    values = []
    for blk in fine_p.blocks:
        images = {coarse_p.block_of[v] for v in blk}
        if len(images) != 1:
            raise ValueError(
                f"block {len(values)} straddles coarse blocks {sorted(images)}")
        values.append(images.pop())
    assignment = GraphMap.make(fine_p.nerve, coarse_p.nerve, values)
    defect = assignment.monotone_epi_defect()
    if defect is not None:
        raise ValueError(f"refinement collapse is not an epi: {defect}")
    return RefinementMap(fine_p, coarse_p, assignment)


def arc_partition(space: SpaceModel, parts: int) -> BrickPartition:
    """Split an interval or cycle into consecutive arcs, sizes as equal
    as possible."""
    if space.family not in ("interval", "cycle"):
        raise ValueError("arc partitions need a 1-dimensional space")
    n = space.n
    if not 1 <= parts <= n:
        raise ValueError("part count out of range")
    base, extra = divmod(n, parts)
    label = []
    for i in range(parts):
        label.extend([i] * (base + (1 if i < extra else 0)))
    return BrickPartition(space, tuple(label))


def band_partition(space: SpaceModel, parts: int, axis: int = 0
                   ) -> BrickPartition:
    """Split a torus grid into full-width bands along one axis."""
    if space.family != "torus_grid":
        raise ValueError("band partitions need a torus grid")
    n = space.params[axis]
    if not 1 <= parts <= n:
        raise ValueError("part count out of range")
    base, extra = divmod(n, parts)
    starts = [0]
    for i in range(parts):
        starts.append(starts[-1] + base + (1 if i < extra else 0))
    of_line = []
    for i in range(parts):
        of_line.extend([i] * (starts[i + 1] - starts[i]))
    label = [of_line[space.coord_of(v)[axis]] for v in range(space.n)]
    return BrickPartition(space, tuple(label))


def box_partition(space: SpaceModel, parts_i: int, parts_j: int
                  ) -> BrickPartition:
    """Split a torus grid into a grid of rectangular blocks."""
    if space.family != "torus_grid":
        raise ValueError("box partitions need a torus grid")
    n, m = space.params
    if n % parts_i or m % parts_j:
        raise ValueError("parts must divide the torus dimensions")
    hi, hj = n // parts_i, m // parts_j
    label = [(space.coord_of(v)[0] // hi) * parts_j
             + space.coord_of(v)[1] // hj for v in range(space.n)]
    return BrickPartition(space, tuple(label))
