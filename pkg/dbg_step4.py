import sys, time
from chainwalks.graphs import Graph, GraphMap
from chainwalks.walks import Walk, PLAIN
from chainwalks.spaces import SpaceModel, band_partition
import chainwalks.calculus as C

depth = int(sys.argv[1]) if len(sys.argv) > 1 else 1
space = SpaceModel.torus_grid(12, 6)
p = band_partition(space, 4)
for _ in range(depth):
    p, = C._pull_all([p])
v = Walk(p.nerve, PLAIN, (0, 1, 2, 3, 0, 1, 2, 3, 0))

part, rho = p, GraphMap.identity(p.nerve)
z = Walk(p.nerve, PLAIN, (v.vertices[0],))
for step in range(1, 4):
    part, rho, z = C._advance(part, rho, v, z, step, True)
    print(f"step {step}: |z|={len(z.vertices)} blocks={part.size} "
          f"sizes={[len(b) for b in part.blocks]} rho={list(rho.values)}")
print("z:", z.vertices)

# dissect step 4
region, prevreg = v.vertices[4], v.vertices[3]
xn = C.cross_nerve(part)
reg = {b for b in range(part.size) if rho.values[b] == region}
prev = {b for b in range(part.size) if rho.values[b] == prevreg}
print("reg0 blocks:", sorted(reg), " prev(3):", sorted(prev),
      " walkset:", z.vertices)
print("fresh lane1:", sorted(b for b in reg - set(z.vertices)
                             if any(c in prev for c in xn.nbrs[b])))

dbl = C.path_doubling(part, z, budget=0)
part2 = dbl.partition
rho2 = rho.compose(C.block_collapse(part2, part))
w0, w1 = dbl.first, dbl.second
print("doubled: blocks=", part2.size,
      " sizes=", [len(b) for b in part2.blocks])
print("w0:", w0.vertices, " w1:", w1.vertices)
print("rho2:", list(rho2.values))
xn2 = C.cross_nerve(part2)
reg2 = {b for b in range(part2.size) if rho2.values[b] == region}
prev2 = {b for b in range(part2.size) if rho2.values[b] == prevreg}
tracks = set(w0.vertices) | set(w1.vertices)
print("reg2:", sorted(reg2), " prev2:", sorted(prev2))
off = sorted(reg2 - tracks)
print("reg2 off tracks:", off)
for b in off:
    print(f"  block {b} size={len(part2.blocks[b])} "
          f"xn-nbrs={sorted(xn2.nbrs[b])} "
          f"prev-adj={any(c in prev2 for c in xn2.nbrs[b])}")
