import math

import numpy as np
import pytest

from equilift.factors import (
    c_bound,
    concentration_stats,
    cycle_partition,
    decompose_even_into_cycles,
    enumerate_perfect_matchings,
    find_perfect_matching,
    sample_a_factor,
    sample_half_factor,
    select_concentrated_factor,
)
from equilift.generate import (
    circulant_bipartite,
    complete_bipartite,
    cycle_graph,
    disjoint_union,
    random_regular_bipartite,
)
from equilift.graphcore import build_graph

from conftest import rng_for


def test_cycle_partition_c4_whole_cycle():
    cp = cycle_partition(cycle_graph(4), 4)
    assert len(cp.short_cycles) == 1 and len(cp.short_cycles[0]) == 4
    assert cp.residual == ()


def test_cycle_partition_threshold_below_girth():
    # bipartite girth is at least 4, so L = 3 must extract nothing
    cp = cycle_partition(cycle_graph(4), 3)
    assert cp.short_cycles == () and len(cp.residual) == 4


def test_cycle_partition_c16_all_residual():
    cp = cycle_partition(cycle_graph(16))
    assert cp.L == 8
    assert cp.short_cycles == ()
    assert len(cp.residual) == 16


def test_cycle_partition_k33_leaves_tree(k33):
    cp = cycle_partition(k33, 6)
    assert [len(c) for c in cp.short_cycles] == [4]
    assert len(cp.residual) == 5
    res = cp.residual_graph()
    # acyclic: a further partition at any threshold extracts nothing
    assert cycle_partition(res, 6).short_cycles == ()


def test_cycle_partition_shortest_first_order():
    # a 4-cycle and a 6-cycle sharing no edges: the 4-cycle must come out first
    g = build_graph(10, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 4)])
    cp = cycle_partition(g, 6)
    assert [len(c) for c in cp.short_cycles] == [4, 6]


def test_cycle_partition_residual_invariant_randomized():
    for seed in range(8):
        rng = rng_for(900, seed)
        side = int(rng.integers(8, 40))
        d = int(rng.integers(2, 6))
        g = random_regular_bipartite(side, d, rng)
        cp = cycle_partition(g)
        # cycles are edge-disjoint and together with the residual cover E
        seen = set()
        for cyc in cp.short_cycles:
            for e in cyc:
                assert e not in seen
                seen.add(e)
        assert len(seen) + len(cp.residual) == g.m
        if cp.residual:
            lam1 = float(np.linalg.eigvalsh(cp.residual_graph().adjacency())[-1])
            assert lam1 <= 2.0 * math.sqrt(2.0 * d) + 1e-9


def test_decompose_empty_and_single_cycle():
    assert decompose_even_into_cycles(build_graph(4, [])) == ()
    cycles = decompose_even_into_cycles(cycle_graph(6))
    assert len(cycles) == 1 and len(cycles[0]) == 6


def test_decompose_two_triangles_sharing_vertex():
    g = build_graph(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
    cycles = decompose_even_into_cycles(g)
    assert sorted(len(c) for c in cycles) == [3, 3]
    assert sum(len(c) for c in cycles) == g.m


def test_decompose_rejects_odd_degree():
    with pytest.raises(ValueError, match="odd degree"):
        decompose_even_into_cycles(build_graph(3, [(0, 1), (1, 2)]))


def test_find_perfect_matching_c4_canonical():
    got = find_perfect_matching(cycle_graph(4))
    assert got == ((0, 1), (2, 3))


def test_find_perfect_matching_k33(k33):
    got = find_perfect_matching(k33)
    assert len(got) == 3
    assert len({u for u, _ in got}) == 3 and len({v for _, v in got}) == 3


def test_find_perfect_matching_star_fails():
    with pytest.raises(ValueError, match="sides"):
        find_perfect_matching(complete_bipartite(1, 3))


def test_enumerate_matchings_k44(k44):
    assert len(enumerate_perfect_matchings(k44)) == 24


def test_half_factor_c4_uniform(c4):
    seen = {}
    for seed in range(2000):
        s = sample_half_factor(c4, rng_for(1, seed))
        assert s.is_regular()
        assert s.m_norm() == 0.0
        key = tuple(map(tuple, s.base.edges[s.h_edge_ids]))
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) == 2
    for count in seen.values():
        assert abs(count / 2000 - 0.5) < 0.05


def test_half_factor_uniform_on_c6():
    g = cycle_graph(6)
    seen = {}
    for seed in range(2000):
        s = sample_half_factor(g, rng_for(2, seed))
        key = tuple(s.h_edge_ids.tolist())
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) == 2
    for count in seen.values():
        assert abs(count / 2000 - 0.5) < 0.05


def test_half_factor_c16_deterministic_with_bound():
    g = cycle_graph(16)
    s0 = sample_half_factor(g, rng_for(3, 0))
    s1 = sample_half_factor(g, rng_for(3, 1))
    assert np.array_equal(s0.h_edge_ids, s1.h_edge_ids)
    assert s0.m_norm() <= 2.0 + 1e-12


def test_half_factor_k44_bound(k44):
    for seed in range(1000):
        s = sample_half_factor(k44, rng_for(4, seed))
        assert s.is_regular() and s.a == 2
        assert s.m_norm() <= math.sqrt(8.0) + 1e-9


def test_half_factor_rejects_odd_degree(k33):
    with pytest.raises(ValueError, match="even"):
        sample_half_factor(k33, rng_for(0))


def test_sample_a_factor_base_case_full():
    g = build_graph(4, [(0, 2), (1, 3)], parts=[1, 1, 2, 2])
    s = sample_a_factor(g, 1, rng_for(5))
    assert np.array_equal(s.h_edge_ids, np.arange(2))
    assert s.m_norm() == 0.0


def test_sample_a_factor_c4(c4):
    seen = set()
    for seed in range(50):
        s = sample_a_factor(c4, 1, rng_for(6, seed))
        assert s.is_regular()
        assert s.m_norm() == 0.0
        seen.add(tuple(s.h_edge_ids.tolist()))
    assert len(seen) == 2


def test_sample_a_factor_k66_bounds():
    g = complete_bipartite(6, 6)
    cd = c_bound(6)
    for a in range(7):
        for seed in range(60):
            s = sample_a_factor(g, a, rng_for(7, a, seed))
            assert s.is_regular()
            assert s.m_norm() <= cd + 1e-9


def test_sample_a_factor_rejects_bad_a(c4):
    with pytest.raises(ValueError, match="0..2"):
        sample_a_factor(c4, 3, rng_for(0))


def test_sample_complement_duality():
    g = random_regular_bipartite(12, 5, rng_for(8))
    for a in (3, 4, 5):
        for seed in range(10):
            s_hi = sample_a_factor(g, a, rng_for(9, a, seed))
            s_lo = sample_a_factor(g, 5 - a, rng_for(9, a, seed))
            assert np.array_equal(
                np.setdiff1d(np.arange(g.m), s_lo.h_edge_ids), s_hi.h_edge_ids
            )
            assert np.allclose(s_hi.m_weights, -s_lo.m_weights)


def test_sample_odd_degree_path():
    g = random_regular_bipartite(10, 5, rng_for(10))
    for a in (1, 2):
        for seed in range(20):
            s = sample_a_factor(g, a, rng_for(11, a, seed))
            assert s.is_regular()
            assert s.m_norm() <= c_bound(5) + 1e-9


def test_sampling_deterministic_per_seed():
    g = random_regular_bipartite(16, 6, rng_for(12))
    s1 = sample_a_factor(g, 2, rng_for(13))
    s2 = sample_a_factor(g, 2, rng_for(13))
    assert np.array_equal(s1.h_edge_ids, s2.h_edge_ids)
    assert np.array_equal(s1.m_weights, s2.m_weights)


def test_c_bound_examples():
    assert c_bound(1) == 0.0
    assert c_bound(2) == 2.0
    assert c_bound(3) == 3.0
    assert abs(c_bound(6) - (c_bound(3) + math.sqrt(12))) < 1e-12


def test_c_bound_six_sqrt_sweep_to_a_million():
    # direct sweep of the recursion (independent of c_bound's chain walk)
    limit = 10**6
    c = np.zeros(limit + 1)
    for d in range(2, limit + 1):
        c[d] = c[d // 2] + math.sqrt(2.0 * d) if d % 2 == 0 else c[d - 1] + 1.0
    assert (c[1:] <= 6.0 * np.sqrt(np.arange(1, limit + 1)) + 1e-12).all()
    for d in (1, 2, 3, 17, 256, 999_983):
        assert abs(c_bound(d) - c[d]) < 1e-9


def test_select_concentrated_empty_subspace(k44):
    search = select_concentrated_factor(k44, 2, np.empty((8, 0)), 10, rng_for(14))
    assert search.met and search.trials == 1 and search.bound == 0.0


def test_select_concentrated_constant_vector_on_k44(k44):
    ones = np.full((8, 1), 1.0 / math.sqrt(8.0))
    search = select_concentrated_factor(k44, 2, ones, 10, rng_for(15))
    assert search.met
    assert search.bound <= 1e-9  # regularity forces equality on the constant vector


def test_select_concentrated_random_subspace():
    g = random_regular_bipartite(128, 8, rng_for(16))
    rng = rng_for(17)
    raw = rng.standard_normal((g.n, 4))
    basis = np.linalg.qr(raw)[0]
    search = select_concentrated_factor(g, 3, basis, 100, rng_for(18))
    assert search.met
    assert search.bound <= 7.0 * math.sqrt(8.0) + 1e-9
    assert search.trials <= 100


def test_select_concentrated_requires_orthonormal(k44):
    bad = np.ones((8, 2))
    with pytest.raises(ValueError, match="orthonormal"):
        select_concentrated_factor(k44, 1, bad, 5, rng_for(19))


def test_concentration_c4_exact():
    # with M = 0 and both factors equally likely, the statistic never exceeds
    # its threshold at t = 3
    g = cycle_graph(4)
    rng = rng_for(20)
    u = 1 - 2.0 * rng.integers(0, 2, 4)
    v = 1 - 2.0 * rng.integers(0, 2, 4)
    rep = concentration_stats(g, 1, u, v, 500, (3.0,), rng_for(21))
    assert rep.frequencies[0] == 0.0
    assert rep.bounds[0] == pytest.approx(2.0 * math.exp(-4.5))
    assert rep.within_bounds


def test_concentration_t_zero_trivial_bound():
    g = random_regular_bipartite(16, 4, rng_for(25))
    rep = concentration_stats(g, 2, np.ones(32), np.ones(32), 50, (0.0,), rng_for(26))
    assert rep.bounds[0] == pytest.approx(2.0 * math.log2(4))
    assert rep.bounds[0] >= 1.0
    assert rep.within_bounds


def test_concentration_report_shape():
    g = random_regular_bipartite(32, 4, rng_for(22))
    rep = concentration_stats(g, 1, np.ones(64), np.ones(64), 200, (1.0, 2.0, 3.0), rng_for(23))
    assert len(rep.frequencies) == 3 and len(rep.bounds) == 3
    assert rep.bounds[0] == pytest.approx(4.0 * math.exp(-0.5))
    assert rep.within_bounds


def test_factor_sample_dense_matrix_matches_weights():
    g = circulant_bipartite(8, (0, 1, 3))
    s = sample_a_factor(g, 1, rng_for(24))
    dense = s.M
    assert np.array_equal(dense, dense.T)
    e = g.edges
    assert np.allclose(dense[e[:, 0], e[:, 1]], s.m_weights)
    off = np.ones((g.n, g.n), dtype=bool)
    off[e[:, 0], e[:, 1]] = False
    off[e[:, 1], e[:, 0]] = False
    assert np.all(dense[off] == 0.0)


def test_disconnected_even_cycles_partition():
    g = disjoint_union(cycle_graph(4), cycle_graph(6))
    cp = cycle_partition(g, 6)
    assert sorted(len(c) for c in cp.short_cycles) == [4, 6]
