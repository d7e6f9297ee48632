"""Throwaway: measure the wall clearance of step-3 tube layers."""
import sys
import chainwalks.calculus as C
from chainwalks.graphs import GraphMap
from chainwalks.spaces import SpaceModel, band_partition
from chainwalks.walks import Walk, PLAIN

depth = int(sys.argv[1]) if len(sys.argv) > 1 else 2
sp = SpaceModel.torus_grid(12, 6)
p = band_partition(sp, 4)
for _ in range(depth):
    p, = C._pull_all([p])
v = Walk(p.nerve, PLAIN, (0, 1, 2, 3, 0, 1, 2, 3, 0))
uncrossed = v.is_uncrossed()
part, rho = p, GraphMap.identity(p.nerve)
z = Walk(part.nerve, PLAIN, (v.vertices[0],))
for step in range(1, 3):
    part, rho, z = C._advance(part, rho, v, z, step, uncrossed)

g = part.space.fine
blocks = part.blocks
vs = z.vertices
for b in vs:
    host = set(blocks[b])
    dd = C._dist_from(g, (x for x in range(g.n) if x not in host))
    prof = sorted(dd[x] for x in host)
    import collections
    hist = collections.Counter(dd[x] for x in host)
    print(f"block {b}: |{len(host)}| wall-clearance hist "
          f"{dict(sorted(hist.items()))}")

# widest route through host0 vs its own wall
host0 = set(blocks[vs[1]])
dd = C._dist_from(g, (x for x in range(g.n) if x not in host0))
ends = sorted(x for x in host0
              if any(y in blocks[vs[0]] for y in g.nbrs[x]))
exs = sorted(x for x in host0
             if any(y in blocks[vs[2]] for y in g.nbrs[x]))
best = None
leg = C._widest_leg(g, ends[len(ends)//2], exs[len(exs)//2], host0, dd)
if leg:
    bn = min(dd[x] for x in leg[1:-1]) if len(leg) > 2 else -99
    print(f"host0 widest route: len={len(leg)} interior wall bottleneck={bn}")
