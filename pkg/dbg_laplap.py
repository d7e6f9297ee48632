"""Throwaway: lap-lap upgrade with progress output."""
import sys
import time
import chainwalks.calculus as C
from chainwalks.spaces import SpaceModel, band_partition
from chainwalks.walks import Walk, PLAIN

sp = SpaceModel.torus_grid(12, 6)
p = band_partition(sp, 4)
v = Walk(p.nerve, PLAIN, (0, 1, 2, 3, 0, 1, 2, 3, 0))

orig = C._advance
t0 = time.time()


def spy(part, rho, z, *args, **kw):
    raise AssertionError


def spy_advance(part, rho, v, z, step, uncrossed):
    t = time.time() - t0
    print(f"[{t:7.1f}s] step {step}: |z|={len(z.vertices)} "
          f"fine={part.space.n} blocks={part.size}", flush=True)
    try:
        got = orig(part, rho, v, z, step, uncrossed)
        print(f"[{time.time()-t0:7.1f}s]   step {step} ok -> "
              f"|z|={len(got[2].vertices)}", flush=True)
        return got
    except C._StepFailed as e:
        print(f"[{time.time()-t0:7.1f}s]   step {step} FAILED: "
              f"{str(e)[:160]}", flush=True)
        raise


C._advance = spy_advance

budget = int(sys.argv[1]) if len(sys.argv) > 1 else 5
try:
    res = C.upgrade_to_path(p, v, budget=budget)
    from chainwalks.calculus import block_collapse
    rho = block_collapse(res.partition, res.base)
    img = res.walk.induce(rho)
    print(f"lap-lap OK depth={res.depth} len={len(res.walk.vertices)} "
          f"spaced={res.walk.is_spaced()} "
          f"mono={img.monotone_witness(v) is not None} "
          f"[{time.time()-t0:.1f}s]", flush=True)
except C.SubdivisionBudgetError as e:
    print(f"lap-lap FAIL [{time.time()-t0:.1f}s]: {e}", flush=True)
