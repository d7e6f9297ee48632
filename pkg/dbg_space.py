"""Throwaway: verbose replay of _try_space_out failures during upgrade."""
import chainwalks.calculus as C
from chainwalks.calculus import (_walk_layout, _dist_from, _fatten, _carve,
                                 _FAR, _widest_leg, block_collapse)
from chainwalks.walks import Walk, PLAIN, CIRCULAR, LASSO, bfs_path
from chainwalks.spaces import SpaceModel, box_partition

orig = C._try_space_out


def verbose(p, w, frozen=frozenset()):
    got = orig(p, w, frozen)
    if got is not None:
        return got
    g = p.space.fine
    blocks = p.blocks
    pos, arcs, sep = _walk_layout(w)
    n = len(pos)
    print(f"--- respace FAIL n={n} verts={w.vertices} kind={w.kind}")
    print(f"    block sizes: {[len(blocks[b]) for b in pos]}  fine n={g.n}")
    cells = [set(blocks[b]) for b in pos]
    partners = [set() for _ in range(n)]
    for i, j in sep:
        partners[i].add(j)
        partners[j].add(i)
    walk_union = set().union(*cells)
    outside_all = set(range(g.n)) - walk_union
    danger = [set().union(*(cells[j] for j in partners[i]))
              if partners[i] else set() for i in range(n)]
    entries = [[] for _ in range(n)]
    exits = [[] for _ in range(n)]
    for a, b in arcs:
        bad = danger[a] | danger[b] | outside_all
        dd = _dist_from(g, bad) if bad else None
        best = None
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
            print(f"    arc {a}->{b}: NO cross edge")
            return None
        print(f"    arc {a}->{b}: score={best[0]} e={best[1]} s={best[2]}")
        entries[b].append(best[1])
        exits[a].append(best[2])
    anchors = [[] for _ in range(n)]
    anchor_at = []
    if w.kind in (PLAIN, LASSO):
        anchor_at.append(0)
    if w.kind == PLAIN and n > 1:
        anchor_at.append(n - 1)
    for i in anchor_at:
        dd = _dist_from(g, danger[i]) if danger[i] else None
        outside = [x for x in range(g.n) if x not in cells[i]]
        dout = _dist_from(g, outside) if outside else None
        best = None
        for x in sorted(cells[i]):
            da = _FAR if dd is None else (dd[x] if dd[x] >= 0 else _FAR)
            db = _FAR if dout is None else (dout[x] if dout[x] >= 0 else _FAR)
            sc = min(da, db)
            if best is None or sc > best[0]:
                best = (sc, x)
        print(f"    anchor@{i}: score={best[0]} x={best[1]}")
        anchors[i].append(best[1])
    gammas = []
    for i in range(n):
        chain = list(dict.fromkeys(entries[i] + exits[i] + anchors[i]))
        if not chain:
            chain = [min(cells[i])]
        base = chain[0]
        gam = {base}
        avoid = danger[i] | outside_all
        dd = _dist_from(g, avoid) if avoid else None
        for q in chain[1:]:
            leg = _widest_leg(g, base, q, cells[i], dd)
            if leg is None:
                print(f"    gamma[{i}]: leg {base}->{q} DISCONNECTED")
                return None
            gam |= set(leg)
        if dd is not None:
            bot = min((dd[x] if dd[x] >= 0 else _FAR) for x in gam)
        else:
            bot = _FAR
        print(f"    gamma[{i}]: |gam|={len(gam)} chain={chain} "
              f"clearance_min={bot}")
        gammas.append(gam)
    dd_out = _dist_from(g, outside_all) if outside_all else None
    radius = [g.n] * n
    if dd_out is not None:
        for i in range(n):
            di = min(dd_out[x] if dd_out[x] >= 0 else _FAR
                     for x in gammas[i])
            if di - 3 < radius[i]:
                radius[i] = di - 3
                print(f"    radius[{i}] <- d_out-3 = {di - 3}")
    for i, j in sep:
        dmap = _dist_from(g, gammas[i])
        dij = min(dmap[x] for x in gammas[j])
        cap = (dij - 3) // 2
        if cap < radius[i] or cap < radius[j]:
            print(f"    sep({i},{j}): dij={dij} cap={cap}")
        radius[i] = min(radius[i], cap)
        radius[j] = min(radius[j], cap)
    print(f"    radii={radius}")
    if any(r < 0 for r in radius):
        print("    => radius < 0")
        return None
    pieces = [(pos[i], _fatten(g, gammas[i], cells[i], radius[i]))
              for i in range(n)]
    balls = [g.ball(s, 2) for _, s in pieces]
    for k, ball in enumerate(balls):
        if not ball <= walk_union:
            print(f"    => ball2(piece[{k}]) leaves walk blocks")
            return None
    for i, j in sep:
        if balls[i] & pieces[j][1]:
            print(f"    => ball2(piece[{i}]) hits piece[{j}]")
            return None
    print("    => verbose copy PASSES but original failed?!")
    return None


C._try_space_out = verbose

sp = SpaceModel.torus_grid(12, 12)
p = box_partition(sp, 2, 2)
v = Walk(p.nerve, PLAIN, (0, 1, 0, 2))
try:
    res = C.upgrade_to_path(p, v, budget=2)
    print("UPGRADE OK depth", res.depth)
except C.SubdivisionBudgetError as e:
    print("UPGRADE FAIL:", e)
