"""Throwaway: ASCII map of the step-3 partition's block layout."""
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

W = 12 * 3 ** depth
H = 6 * 3 ** depth
print(f"fine {W}x{H}, z={z.vertices}, blocks={part.size}")
sym = "0123456789abcdefghijklmnop"
rows = []
for y in range(H):
    line = []
    for x in range(W):
        cell = y + H * x
        line.append(sym[part.block_of[cell] % len(sym)])
    rows.append("".join(line))
x0, x1 = (int(a) for a in sys.argv[2:4]) if len(sys.argv) > 3 else (0, W)
for y in range(H):
    print(f"{y:3d} {rows[y][x0:x1]}")
