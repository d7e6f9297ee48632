"""Carving calculus: pair refinement, core refinements, path doubling,
spacing, walk upgrading, and the covering/cycle-partition conversions."""
import random

import pytest

from chainwalks.calculus import (CircularCovering, CoreRefinement,
                                 DoubledPath, SpacedWalk,
                                 SubdivisionBudgetError, WalkOnPartition,
                                 block_collapse, check_circular_cover,
                                 check_core_refinement,
                                 covering_from_cycle_partition,
                                 core_refinement,
                                 cycle_partition_from_covering, pair_refines,
                                 path_doubling, space_out, upgrade_to_path)
from chainwalks.graphs import cycle_graph
from chainwalks.spaces import (BrickPartition, SpaceModel, arc_partition,
                               band_partition, box_partition)
from chainwalks.walks import CIRCULAR, PLAIN, Walk, lift_walk
from conftest import carve_blocks


def doubling_ok(dbl: DoubledPath, u: Walk) -> None:
    """Definitional postconditions: two nerve paths sharing exactly the
    endpoint blocks, each collapsing monotonically onto the input."""
    rho = block_collapse(dbl.partition, dbl.base)
    f, s = dbl.first, dbl.second
    assert f.is_path() and s.is_path()
    shared = set(f.vertices) & set(s.vertices)
    assert shared == {f.vertices[0], f.vertices[-1]}
    assert f.vertices[0] == s.vertices[0]
    assert f.vertices[-1] == s.vertices[-1]
    assert f.induce(rho).monotone_witness(u) is not None
    assert s.induce(rho).monotone_witness(u) is not None


def insulated(sw: SpacedWalk, w: Walk) -> bool:
    """Every nerve neighbor of the spaced path collapses into the walk."""
    rho = block_collapse(sw.partition, sw.base)
    wset = set(w.vertices)
    return all(rho.values[nb] in wset
               for b in sw.walk.vertices for nb in sw.partition.nerve.nbrs[b])


class TestPairRefines:
    def test_identical_pair(self):
        p = arc_partition(SpaceModel.interval(27), 3)
        w = Walk(p.nerve, PLAIN, (0, 1, 2))
        assert pair_refines(WalkOnPartition(p, w), WalkOnPartition(p, w))

    def test_lifted_walk_refines(self):
        space = SpaceModel.interval(27)
        fine = arc_partition(space, 9)
        coarse = arc_partition(space, 3)
        rho = block_collapse(fine, coarse)
        w = Walk(coarse.nerve, PLAIN, (0, 1, 2, 1))
        v = lift_walk(rho, w)
        assert pair_refines(WalkOnPartition(fine, v),
                            WalkOnPartition(coarse, w))

    def test_wrong_starting_block(self):
        space = SpaceModel.interval(27)
        fine = arc_partition(space, 9)
        coarse = arc_partition(space, 3)
        v = Walk(fine.nerve, PLAIN, (4, 5))
        w = Walk(coarse.nerve, PLAIN, (0, 1))
        assert not pair_refines(WalkOnPartition(fine, v),
                                WalkOnPartition(coarse, w))

    def test_non_nested_is_an_error(self):
        space = SpaceModel.interval(27)
        fine = arc_partition(space, 9)
        coarse = arc_partition(space, 2)
        v = Walk(fine.nerve, PLAIN, (0,))
        w = Walk(coarse.nerve, PLAIN, (0,))
        with pytest.raises(ValueError):
            pair_refines(WalkOnPartition(fine, v), WalkOnPartition(coarse, w))


class TestCoreRefinement:
    def test_trivial_inputs(self):
        space = SpaceModel.torus_grid(9, 9)
        triv = BrickPartition.trivial(space)
        cr = core_refinement(triv, triv)
        assert cr.partition.size == 1
        assert check_core_refinement(cr.partition, cr.u, cr.v) is None

    def test_torus_boxes_against_shifted_boxes(self):
        space = SpaceModel.torus_grid(9, 9)
        u = box_partition(space, 3, 3)
        labels = []
        for c in range(space.n):
            x, y = space.coord_of(c)
            labels.append(3 * (((x + 1) % 9) // 3) + (((y + 1) % 9) // 3))
        v = BrickPartition(space, tuple(labels))
        cr = core_refinement(u, v)
        assert check_core_refinement(cr.partition, cr.u, cr.v) is None

    def test_interval_thirds_against_halves(self):
        space = SpaceModel.interval(27)
        cr = core_refinement(arc_partition(space, 3), arc_partition(space, 2))
        assert check_core_refinement(cr.partition, cr.u, cr.v) is None

    def test_inputs_are_pulled_to_the_result_space(self):
        space = SpaceModel.torus_grid(9, 9)
        u = box_partition(space, 3, 3)
        labels = []
        for c in range(space.n):
            x, y = space.coord_of(c)
            labels.append(3 * (((x + 1) % 9) // 3) + (((y + 1) % 9) // 3))
        v = BrickPartition(space, tuple(labels))
        cr = core_refinement(u, v)
        assert cr.partition.space == cr.u.space == cr.v.space
        assert cr.u.size == u.size and cr.v.size == v.size

    def test_different_spaces_rejected(self):
        a = BrickPartition.trivial(SpaceModel.interval(9))
        b = BrickPartition.trivial(SpaceModel.interval(12))
        with pytest.raises(ValueError):
            core_refinement(a, b)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_carved_pairs(self, seed):
        rng = random.Random(seed)
        space = SpaceModel.cycle(24)
        u = BrickPartition(space,
                           tuple(carve_blocks(space.fine, 4, rng)))
        v = BrickPartition(space,
                           tuple(carve_blocks(space.fine, 3, rng)))
        cr = core_refinement(u, v)
        assert check_core_refinement(cr.partition, cr.u, cr.v) is None


class TestPathDoubling:
    def test_single_block_is_vacuous(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        u = Walk(p.nerve, PLAIN, (1,))
        dbl = path_doubling(p, u)
        assert dbl.first.vertices == dbl.second.vertices == (1,)
        assert dbl.partition.size == p.size

    def test_interval_three_block_path(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        u = Walk(p.nerve, PLAIN, (0, 1, 2))
        doubling_ok(path_doubling(p, u), u)

    def test_torus_band_path(self):
        p = band_partition(SpaceModel.torus_grid(12, 6), 4)
        u = Walk(p.nerve, PLAIN, (0, 1, 2))
        doubling_ok(path_doubling(p, u), u)

    def test_non_path_rejected(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        with pytest.raises(ValueError):
            path_doubling(p, Walk(p.nerve, PLAIN, (0, 1, 0)))


class TestSpaceOut:
    def test_already_spaced_returns_unchanged(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        w = Walk(p.nerve, PLAIN, (0, 1, 2))
        sw = space_out(p, w)
        assert sw.partition is p and sw.walk is w and sw.depth == 0

    def test_torus_band_walk_gets_spaced_and_insulated(self):
        p = band_partition(SpaceModel.torus_grid(12, 6), 4)
        for _ in range(2):
            sub, parent = p.space.subdivide()
            p = p.pull_back(sub, parent)
        w = Walk(p.nerve, PLAIN, (0, 1, 2, 3))
        assert not w.is_spaced()
        sw = space_out(p, w)
        assert sw.walk.is_spaced() and sw.walk.is_path()
        assert insulated(sw, w)
        rho = block_collapse(sw.partition, p)
        assert sw.walk.induce(rho).monotone_witness(w) is not None

    def test_circular_stays_circular(self):
        p = band_partition(SpaceModel.torus_grid(12, 6), 4)
        for _ in range(2):
            sub, parent = p.space.subdivide()
            p = p.pull_back(sub, parent)
        w = Walk(p.nerve, CIRCULAR, (0, 1, 2, 3, 0))
        sw = space_out(p, w)
        assert sw.walk.kind == CIRCULAR
        assert sw.walk.is_spaced()
        assert insulated(sw, w)

    def test_non_path_rejected(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        with pytest.raises(ValueError):
            space_out(p, Walk(p.nerve, PLAIN, (0, 1, 0)))


class TestUpgradeToPath:
    def test_spaced_path_upgrades_monotonically(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        v = Walk(p.nerve, PLAIN, (0, 1, 2))
        sw = upgrade_to_path(p, v, budget=2)
        rho = block_collapse(sw.partition, p)
        assert sw.walk.is_spaced() and sw.walk.is_path()
        assert sw.walk.induce(rho).monotone_witness(v) is not None

    def test_crossed_revisit_refines(self):
        p = box_partition(SpaceModel.torus_grid(12, 12), 2, 2)
        v = Walk(p.nerve, PLAIN, (0, 1, 0, 2))
        sw = upgrade_to_path(p, v, budget=2)
        assert sw.walk.is_spaced() and sw.walk.is_path()
        hosted = Walk(sw.base.nerve, v.kind, v.vertices)
        assert pair_refines(WalkOnPartition(sw.partition, sw.walk),
                            WalkOnPartition(sw.base, hosted))

    def test_two_laps_upgrade_monotonically(self):
        p = band_partition(SpaceModel.torus_grid(12, 6), 4)
        v = Walk(p.nerve, PLAIN, (0, 1, 2, 3, 0, 1, 2, 3, 0))
        assert v.is_uncrossed()
        sw = upgrade_to_path(p, v, budget=3)
        rho = block_collapse(sw.partition, sw.base)
        hosted = Walk(sw.base.nerve, v.kind, v.vertices)
        assert sw.walk.is_spaced() and sw.walk.is_path()
        assert sw.walk.induce(rho).monotone_witness(hosted) is not None
        assert pair_refines(WalkOnPartition(sw.partition, sw.walk),
                            WalkOnPartition(sw.base, hosted))

    def test_unreduced_rejected(self):
        p = arc_partition(SpaceModel.interval(81), 3)
        with pytest.raises(ValueError):
            upgrade_to_path(p, Walk(p.nerve, PLAIN, (0, 0, 1)))


ARC_COVER = [frozenset({0, 1, 2, 3}), frozenset({3, 4, 5, 6}),
             frozenset({6, 7, 8, 9}), frozenset({9, 10, 11, 0})]


class TestCoveringConversions:
    def test_cycle_arcs_make_a_c4_partition(self):
        space = SpaceModel.cycle(12)
        assert check_circular_cover(space, ARC_COVER) is None
        cp = cycle_partition_from_covering(space, ARC_COVER)
        assert cp.partition.nerve == cycle_graph(4)

    def test_torus_bands_make_a_c4_partition(self):
        space = SpaceModel.torus_grid(12, 4)
        bands = []
        for i in range(4):
            cols = {(3 * i + k) % 12 for k in range(4)}
            bands.append(frozenset(
                c for c in range(space.n) if space.coord_of(c)[0] in cols))
        assert check_circular_cover(space, bands) is None
        cp = cycle_partition_from_covering(space, bands)
        assert cp.partition.nerve == cycle_graph(4)

    def test_wide_arcs_violate_the_pattern(self):
        space = SpaceModel.cycle(12)
        bad = [frozenset({0, 1, 2, 3, 4, 5}), frozenset({4, 5, 6, 7}),
               frozenset({7, 8, 9, 10}), frozenset({10, 11, 0})]
        with pytest.raises(ValueError, match=r"pair \(0,2\)"):
            cycle_partition_from_covering(space, bad)

    def test_cycle_partition_fattens_to_a_covering(self):
        p = arc_partition(SpaceModel.cycle(12), 4)
        cov = covering_from_cycle_partition(p)
        assert len(cov.sets) == 4
        assert check_circular_cover(cov.partition.space, cov.sets) is None

    def test_torus_bands_fatten_to_a_covering(self):
        p = band_partition(SpaceModel.torus_grid(12, 4), 4)
        cov = covering_from_cycle_partition(p)
        assert len(cov.sets) == 4
        assert check_circular_cover(cov.partition.space, cov.sets) is None

    def test_non_cycle_nerve_rejected(self):
        p = arc_partition(SpaceModel.interval(9), 3)
        with pytest.raises(ValueError):
            covering_from_cycle_partition(p)

    def test_round_trip_keeps_the_cycle_nerve(self):
        p = arc_partition(SpaceModel.cycle(12), 4)
        cov = covering_from_cycle_partition(p)
        back = cycle_partition_from_covering(cov.partition.space, cov.sets)
        assert back.partition.nerve == cycle_graph(4)
