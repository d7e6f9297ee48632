"""Winding numbers against a reference cycle, and the three transfer facts."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainwalks.graphs import Graph, GraphMap, cycle_graph
from chainwalks.walks import (Walk, circular_walk, concat, lift_walk,
                              plain_walk)
from chainwalks.winding import (CircularReference, check_monotone_invariance,
                                close_walks_bound, initial_segment_winding,
                                prefix_windings, weight, winding_number)
from conftest import random_walk


def wind_oracle(body, vertices):
    """Definitional sum over consecutive pairs, scanning the edge list."""
    n = len(body)
    fwd = {(body[i], body[(i + 1) % n]) for i in range(n)}
    total = 0
    for x, y in zip(vertices, vertices[1:]):
        if (x, y) in fwd:
            total += 1
        elif (y, x) in fwd:
            total -= 1
    return total


def lap_reference(n: int) -> CircularReference:
    g = cycle_graph(n)
    return CircularReference.make(circular_walk(g, range(n)))


def chordy_host(rng: random.Random, n: int) -> Graph:
    """cycle_graph(n) with a few extra chords; the standard lap survives."""
    edges = [(i, (i + 1) % n) for i in range(n)]
    for _ in range(rng.randint(0, n // 2)):
        u, v = rng.sample(range(n), 2)
        edges.append((u, v))
    return Graph.from_edges(n, edges)


class TestReference:
    def test_rejects_non_circular(self):
        g = cycle_graph(4)
        with pytest.raises(ValueError):
            CircularReference.make(plain_walk(g, [0, 1, 2]))

    def test_rejects_short_cycle(self):
        g = cycle_graph(4)
        with pytest.raises(ValueError):
            CircularReference.make(circular_walk(g, [0, 1]))

    def test_rejects_non_path(self):
        g = cycle_graph(4)
        w = Walk(g, "circular", (0, 1, 0, 1, 0))
        with pytest.raises(ValueError):
            CircularReference.make(w)

    def test_spaced_flag_honest(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
        c = CircularReference.make(circular_walk(g, [0, 1, 2, 3]))
        assert c.spaced is False
        with pytest.raises(ValueError):
            CircularReference(g, circular_walk(g, [0, 1, 2, 3]), True)
        assert lap_reference(4).spaced is True

    def test_body_and_confines(self):
        c = lap_reference(5)
        assert c.body() == frozenset(range(5))
        assert c.length == 5
        assert c.confines(plain_walk(c.host, [0, 4, 3]))

    def test_json_round_trip(self):
        c = lap_reference(6)
        text = c.to_json()
        assert '"role":"reference"' in text
        assert CircularReference.from_json(text) == c

    def test_json_rejects_plain_walk_record(self):
        from chainwalks.walks import walk_to_json
        w = circular_walk(cycle_graph(4), range(4))
        with pytest.raises(ValueError):
            CircularReference.from_json(walk_to_json(w))


class TestWeight:
    def test_forward_edge(self):
        assert weight(lap_reference(4), 0, 1) == 1
        assert weight(lap_reference(4), 3, 0) == 1

    def test_backward_edge(self):
        assert weight(lap_reference(4), 1, 0) == -1
        assert weight(lap_reference(4), 0, 3) == -1

    def test_non_edge_and_loops(self):
        c = lap_reference(4)
        assert weight(c, 0, 2) == 0
        for x in range(4):
            assert weight(c, x, x) == 0

    def test_triangle_loops_are_zero(self):
        c = lap_reference(3)
        for x in range(3):
            assert weight(c, x, x) == 0

    def test_vertex_range_checked(self):
        with pytest.raises(ValueError):
            weight(lap_reference(4), 0, 7)

    def test_off_cycle_vertices_weigh_nothing(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
        c = CircularReference.make(circular_walk(g, [0, 1, 2, 3]))
        assert weight(c, 0, 4) == 0
        assert weight(c, 4, 0) == 0


class TestWindingNumber:
    def test_full_lap(self):
        c = lap_reference(4)
        assert winding_number(c, circular_walk(c.host, range(4))) == 4

    def test_lap_counts_closing_edge(self):
        c = lap_reference(4)
        assert winding_number(c, plain_walk(c.host, [0, 1, 2, 3])) == 3

    def test_there_and_back(self):
        c = lap_reference(4)
        assert winding_number(c, plain_walk(c.host, [0, 1, 0])) == 0

    def test_empty_walk(self):
        c = lap_reference(4)
        assert winding_number(c, plain_walk(c.host, [])) == 0

    @pytest.mark.parametrize("n,k", [(5, 3), (4, 2), (6, 4)])
    def test_repeated_laps(self, n, k):
        c = lap_reference(n)
        lap = circular_walk(c.host, range(n))
        w = lap.power(k)
        assert winding_number(c, w) == k * n
        assert winding_number(c, w) == wind_oracle(
            c.cycle.vertices[:-1], w.vertices)

    def test_host_mismatch(self):
        with pytest.raises(ValueError):
            winding_number(lap_reference(4), plain_walk(cycle_graph(5), [0]))

    @given(st.integers(0, 10**6))
    def test_matches_oracle_on_random_walks(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 8)
        g = chordy_host(rng, n)
        c = CircularReference.make(circular_walk(g, range(n)))
        w = random_walk(g, rng, rng.randint(1, 12))
        assert winding_number(c, w) == wind_oracle(tuple(range(n)),
                                                   w.vertices)

    @given(st.integers(0, 10**6))
    def test_reversal_negates(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 8)
        g = chordy_host(rng, n)
        c = CircularReference.make(circular_walk(g, range(n)))
        w = random_walk(g, rng, rng.randint(1, 12))
        assert winding_number(c, w.reverse()) == -winding_number(c, w)

    @given(st.integers(0, 10**6))
    def test_concat_adds_up_to_the_seam(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 8)
        g = cycle_graph(n)
        c = CircularReference.make(circular_walk(g, range(n)))
        w = random_walk(g, rng, rng.randint(1, 8))
        start = rng.choice(sorted(g.nbrs[w.vertices[-1]]
                                  + (w.vertices[-1],)))
        v = random_walk(g, rng, rng.randint(1, 8), start=start)
        joined = concat(w, v)
        seam = weight(c, w.vertices[-1], v.vertices[0])
        assert winding_number(c, joined) == (
            winding_number(c, w) + seam + winding_number(c, v))

    def test_prefix_windings(self):
        c = lap_reference(4)
        w = plain_walk(c.host, [0, 1, 2, 3, 0, 1])
        assert prefix_windings(c, w) == (0, 1, 2, 3, 4, 5)
        back = plain_walk(c.host, [2, 1, 0, 3])
        assert prefix_windings(c, back) == (0, -1, -2, -3)
        assert prefix_windings(c, plain_walk(c.host, [])) == ()

    @given(st.integers(0, 10**6))
    def test_prefix_windings_match_prefixes(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 7)
        g = chordy_host(rng, n)
        c = CircularReference.make(circular_walk(g, range(n)))
        w = random_walk(g, rng, rng.randint(1, 10))
        pw = prefix_windings(c, w)
        for i in range(len(w.vertices)):
            prefix = plain_walk(g, w.vertices[:i + 1])
            assert pw[i] == winding_number(c, prefix)

    @pytest.mark.parametrize("n", [4, 5])
    def test_confined_windings_track_endpoint_mod_n(self, n):
        # every confined walk from C(0): winding == end index mod n,
        # exhaustively up to 8 entries
        c = lap_reference(n)
        g = c.host
        frontier = [(0,)]
        for _ in range(7):
            frontier = [vs + (x,) for vs in frontier
                        for x in (vs[-1], (vs[-1] + 1) % n,
                                  (vs[-1] - 1) % n)]
            for vs in frontier:
                wind = winding_number(c, plain_walk(g, vs))
                assert wind % n == vs[-1] % n


class TestMonotoneInvariance:
    def test_stuttered_walk(self):
        c = lap_reference(4)
        v = plain_walk(c.host, [0, 1, 2])
        w = plain_walk(c.host, [0, 0, 1, 1, 1, 2])
        verdict = check_monotone_invariance(c, w, v)
        assert verdict.finer == verdict.coarser == 2

    def test_empty_extension(self):
        c = lap_reference(4)
        empty = plain_walk(c.host, [])
        verdict = check_monotone_invariance(c, empty, empty)
        assert verdict.finer == verdict.coarser == 0

    def test_requires_refinement(self):
        c = lap_reference(4)
        with pytest.raises(ValueError):
            check_monotone_invariance(c, plain_walk(c.host, [0, 1]),
                                      plain_walk(c.host, [0, 3]))

    def test_lift_through_doubling(self):
        fine, coarse = cycle_graph(6), cycle_graph(3)
        f = GraphMap.make(fine, coarse, (0, 0, 1, 1, 2, 2))
        v = circular_walk(coarse, range(3))
        image = lift_walk(f, v).induce(f)
        c = CircularReference.make(circular_walk(coarse, range(3)))
        verdict = check_monotone_invariance(c, image, v)
        assert verdict.coarser == 3

    @given(st.integers(0, 10**6))
    @settings(max_examples=150)
    def test_random_stutterings(self, seed):
        rng = random.Random(seed)
        n = rng.randint(4, 8)
        g = chordy_host(rng, n)
        c = CircularReference.make(circular_walk(g, range(n)))
        v = random_walk(g, rng, rng.randint(1, 8))
        stuttered = []
        for x in v.vertices:
            stuttered.extend([x] * rng.randint(1, 3))
        w = plain_walk(g, stuttered)
        verdict = check_monotone_invariance(c, w, v)
        assert verdict.finer == verdict.coarser


class TestInitialSegment:
    def test_segment_itself(self):
        c = lap_reference(6)
        w = plain_walk(c.host, [0, 1, 2, 3])
        assert initial_segment_winding(c, w, w) == 3

    def test_backtracking(self):
        c = lap_reference(6)
        w = plain_walk(c.host, [0, 1, 2, 3])
        z = plain_walk(c.host, [0, 1, 0, 1, 2])
        assert initial_segment_winding(c, w, z) == 2

    def test_single_vertex(self):
        c = lap_reference(6)
        w = plain_walk(c.host, [0, 1, 2, 3])
        assert initial_segment_winding(c, w, plain_walk(c.host, [0])) == 0

    def test_through_homomorphism(self):
        fine = cycle_graph(12)
        c = lap_reference(4)
        rho = GraphMap.make(fine, c.host, tuple(v // 3 for v in range(12)))
        w = plain_walk(fine, range(9))
        z = plain_walk(fine, [0, 1, 2, 1, 2, 3, 4, 3, 4, 5])
        assert initial_segment_winding(c, w, z, alpha=rho) == 1

    def test_rejects_non_spaced_reference_walk(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
        c = CircularReference.make(circular_walk(g, [0, 1, 2, 3]))
        w = plain_walk(g, [0, 1, 2])  # chord 0-2 breaks spacing
        with pytest.raises(ValueError):
            initial_segment_winding(c, w, w)

    def test_rejects_wandering_off_segment(self):
        c = lap_reference(6)
        w = plain_walk(c.host, [0, 1, 2, 3])
        with pytest.raises(ValueError):
            initial_segment_winding(c, w, plain_walk(c.host, [0, 5]))
        with pytest.raises(ValueError):
            initial_segment_winding(c, w, plain_walk(c.host, [1, 2]))
        with pytest.raises(ValueError):
            initial_segment_winding(c, w, plain_walk(c.host, []))

    def test_rejects_alpha_shape_mismatch(self):
        c = lap_reference(4)
        fine = cycle_graph(12)
        w = plain_walk(fine, range(3))
        with pytest.raises(ValueError):
            initial_segment_winding(c, w, w)

    @given(st.integers(0, 10**6))
    @settings(max_examples=150)
    def test_random_wanderings(self, seed):
        # walk forward with random backtracks inside the discovered segment
        rng = random.Random(seed)
        fine = cycle_graph(12)
        c = lap_reference(4)
        rho = GraphMap.make(fine, c.host, tuple(v // 3 for v in range(12)))
        w = plain_walk(fine, range(rng.randint(2, 10)))
        vs = [0]
        top = 0
        for _ in range(rng.randint(1, 20)):
            move = rng.choice([-1, 0, 1])
            nxt = vs[-1] + move
            if nxt < 0:
                nxt = vs[-1]
            if nxt > top + 1 or nxt >= len(w.vertices):
                nxt = vs[-1]
            top = max(top, nxt)
            vs.append(nxt)
        z = plain_walk(fine, vs)
        expected = winding_number(
            c, plain_walk(fine, range(vs[-1] + 1)).induce(rho))
        assert initial_segment_winding(c, w, z, alpha=rho) == expected


class TestCloseWalks:
    def test_identical_walks(self):
        c = lap_reference(5)
        z = plain_walk(c.host, [0, 1, 2])
        verdict = close_walks_bound(c, z, z)
        assert verdict.difference == 0
        assert verdict.head_weight == verdict.tail_weight == 0

    def test_shifted_pair(self):
        c = lap_reference(4)
        z = plain_walk(c.host, [0, 1, 2])
        z2 = plain_walk(c.host, [1, 2, 3])
        verdict = close_walks_bound(c, z, z2)
        assert verdict.difference == 0
        assert (verdict.head_weight, verdict.tail_weight) == (-1, 1)
        assert verdict.wind_first == verdict.wind_second == 2

    def test_sharp_difference(self):
        c = lap_reference(4)
        z = plain_walk(c.host, [1, 0])
        z2 = plain_walk(c.host, [0, 1])
        assert close_walks_bound(c, z, z2).difference == 2
        assert close_walks_bound(c, z2, z).difference == -2

    def test_needs_spaced_reference(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
        c = CircularReference.make(circular_walk(g, [0, 1, 2, 3]))
        z = plain_walk(g, [0, 1])
        with pytest.raises(ValueError):
            close_walks_bound(c, z, z)

    def test_needs_length_four(self):
        c = lap_reference(3)
        z = plain_walk(c.host, [0, 1])
        with pytest.raises(ValueError):
            close_walks_bound(c, z, z)

    def test_rejects_drift(self):
        c = lap_reference(6)
        with pytest.raises(ValueError):
            close_walks_bound(c, plain_walk(c.host, [0, 1]),
                              plain_walk(c.host, [3, 2]))

    def test_rejects_stagger_violation(self):
        c = lap_reference(6)
        z = plain_walk(c.host, [0, 5, 4])
        z2 = plain_walk(c.host, [1, 0, 5])
        # pointwise distance is 1 everywhere, but z2(0)=1 vs z(1)=5 is 2
        with pytest.raises(ValueError):
            close_walks_bound(c, z, z2)

    def test_rejects_length_mismatch(self):
        c = lap_reference(5)
        with pytest.raises(ValueError):
            close_walks_bound(c, plain_walk(c.host, [0, 1]),
                              plain_walk(c.host, [0]))

    def test_rejects_unconfined(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
        c = CircularReference.make(circular_walk(g, [0, 1, 2, 3]))
        z = plain_walk(g, [4, 0])
        with pytest.raises(ValueError):
            close_walks_bound(c, z, plain_walk(g, [0, 1]))

    @given(st.integers(0, 10**6))
    @settings(max_examples=200)
    def test_random_close_pairs(self, seed):
        rng = random.Random(seed)
        n = rng.randint(5, 8)
        c = lap_reference(n)
        k = rng.randint(1, 14)
        steps = [rng.choice([-1, 0, 1]) for _ in range(k - 1)]
        zs = [rng.randrange(n)]
        for s in steps:
            zs.append((zs[-1] + s) % n)
        # offsets e(i) with z2 = z + e, filtered forward so every
        # hypothesis of the bound holds, then sampled backward
        allowed = [[e for e in (-1, 0, 1)
                    if i == k - 1 or abs(e - steps[i]) <= 1]
                   for i in range(k)]
        feas = [set(allowed[0])]
        for i in range(1, k):
            feas.append({e for e in allowed[i]
                         if any(abs(steps[i - 1] + e - p) <= 1
                                for p in feas[-1])})
        e = [rng.choice(sorted(feas[-1]))]
        for i in range(k - 2, -1, -1):
            e.append(rng.choice(sorted(
                {p for p in feas[i] if abs(steps[i] + e[-1] - p) <= 1})))
        e.reverse()
        z2s = [(zs[i] + e[i]) % n for i in range(k)]
        verdict = close_walks_bound(c, plain_walk(c.host, zs),
                                    plain_walk(c.host, z2s))
        assert abs(verdict.difference) <= 2
        assert verdict.difference == verdict.head_weight + verdict.tail_weight
