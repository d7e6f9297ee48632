"""Throwaway: reach lap-lap step 3 at one depth, dissect _try_double there."""
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
    print(f"step {step} done: |z|={len(z.vertices)} blocks={part.size}")

print(f"\nat step 3: z={z.vertices}")
g = part.space.fine
blocks = part.blocks
vs = z.vertices
interior = vs[1:-1]
hosts = [set(blocks[b]) for b in interior]
m = len(hosts)
U0 = blocks[vs[0]]
UL = blocks[vs[-1]]
union = set().union(*hosts)
print(f"m={m} |U0|={len(U0)} |UL|={len(UL)} "
      f"host sizes={[len(h) for h in hosts]}")
dd_out = C._dist_from(g, (x for x in range(g.n) if x not in union))


def clear(c):
    return dd_out[c] if dd_out[c] >= 0 else C._FAR


ports = []
ends = sorted(x for x in hosts[0] if any(y in U0 for y in g.nbrs[x]))
ports.append(C._two_ports(g, [(x,) for x in ends], clear))
print(f"gate 0 (U0->host0): |ends|={len(ends)} ports={ports[-1]}")
for k in range(1, m):
    cands = [(x, y) for x in sorted(hosts[k - 1])
             for y in g.nbrs[x] if y in hosts[k]]
    ports.append(C._two_ports(g, cands, clear))
    print(f"gate {k}: |cands|={len(cands)} ports={ports[-1]}")
lasts = sorted(x for x in hosts[m - 1] if any(y in UL for y in g.nbrs[x]))
ports.append(C._two_ports(g, [(x,) for x in lasts], clear))
print(f"gate {m} (host{m-1}->UL): |lasts|={len(lasts)} ports={ports[-1]}")

if all(pt is not None for pt in ports):
    twin = C._route_twins(g, hosts, ports)
    if twin is None:
        print("twin: _route_twins returned None")
    else:
        dmap = C._dist_from(g, set().union(*twin[0]))
        dmin = min(dmap[x] for x in set().union(*twin[1]))
        print(f"twin ok: leg sizes t0={[len(s) for s in twin[0]]} "
              f"t1={[len(s) for s in twin[1]]} dmin={dmin}")
else:
    print("twin skipped: some port is None")

if all(pt is not None for pt in ports):
    twin2 = C._route_twins(g, hosts, ports)
    if twin2 is not None:
        t0set = set().union(*twin2[0])
        dmap = C._dist_from(g, t0set)
        for k in range(m):
            worst = min(dmap[x] for x in twin2[1][k])
            close = sorted(x for x in twin2[1][k] if dmap[x] <= 2)
            print(f"layer {k}: min cross-dist={worst} "
                  f"cells within 2 of t0: {close[:8]}")
        pins = [ports[0][0][0], ports[0][1][0]]
        for k in range(m):
            pa, pb = ports[k + 1]
            print(f"  gate {k+1} pins: {pa} {pb}")
