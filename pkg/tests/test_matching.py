import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mugroup.errors import SearchSpaceError
from mugroup.matching import (
    Matching,
    WeightedGraph,
    WeightMatrix,
    brute_force_assignment,
    brute_force_matching,
    hungarian,
    max_weight_matching,
)


def graph(n, edges):
    return WeightedGraph(n, tuple(edges))


def random_graph(rng, max_vertices=10, wmin=-5, wmax=20):
    n = int(rng.integers(2, max_vertices + 1))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                edges.append((i, j, float(rng.integers(wmin, wmax + 1))))
    return graph(n, edges)


class TestWeightedGraphInvariants:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            graph(2, [(0, 0, 1.0)])

    def test_rejects_parallel_edges(self):
        with pytest.raises(ValueError):
            graph(3, [(0, 1, 1.0), (1, 0, 2.0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            graph(2, [(0, 2, 1.0)])

    def test_matching_rejects_vertex_reuse(self):
        with pytest.raises(ValueError):
            Matching(((0, 1), (1, 2)), 0.0)


class TestMaxWeightMatching:
    def test_empty_graph(self):
        m = max_weight_matching(graph(3, []))
        assert m.pairs == () and m.total_weight == 0.0

    def test_triangle(self):
        m = max_weight_matching(graph(3, [(0, 1, 3.0), (1, 2, 4.0), (0, 2, 5.0)]))
        assert m.pairs == ((0, 2),)
        assert m.total_weight == 5.0

    def test_path(self):
        m = max_weight_matching(
            graph(4, [(0, 1, 10.0), (1, 2, 11.0), (2, 3, 10.0)]))
        assert m.pairs == ((0, 1), (2, 3))
        assert m.total_weight == 20.0

    def test_negative_edges_left_out(self):
        m = max_weight_matching(graph(2, [(0, 1, -2.0)]))
        assert m.pairs == ()

    def test_complete_k4_unit_weights(self):
        edges = [(i, j, 1.0) for i in range(4) for j in range(i + 1, 4)]
        m = max_weight_matching(graph(4, edges))
        assert m.total_weight == 2.0
        assert len(m.pairs) == 2

    def test_deterministic(self):
        g = random_graph(np.random.default_rng(0))
        assert max_weight_matching(g) == max_weight_matching(g)

    def test_oracle_equivalence_sample(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            g = random_graph(rng)
            fast = max_weight_matching(g)
            exact = brute_force_matching(g)
            assert fast.total_weight == exact.total_weight


class TestBruteForceMatching:
    def test_single_positive_edge(self):
        m = brute_force_matching(graph(2, [(0, 1, 2.0)]))
        assert m.pairs == ((0, 1),)

    def test_single_negative_edge(self):
        m = brute_force_matching(graph(2, [(0, 1, -1.0)]))
        assert m.pairs == ()

    def test_triangle_agrees(self):
        g = graph(3, [(0, 1, 3.0), (1, 2, 4.0), (0, 2, 5.0)])
        assert brute_force_matching(g).total_weight == 5.0

    def test_vertex_guard(self):
        with pytest.raises(SearchSpaceError):
            brute_force_matching(graph(13, []))


class TestHungarian:
    def test_identity_benefit(self):
        assign, benefit = hungarian(np.eye(3))
        assert assign == (0, 1, 2)
        assert benefit == 3.0

    def test_two_by_two(self):
        assign, benefit = hungarian([[1.0, 2.0], [3.0, 5.0]])
        assert assign == (0, 1)
        assert benefit == 6.0

    def test_rectangular(self):
        assign, benefit = hungarian([[1.0, 9.0, 2.0], [8.0, 1.0, 3.0]])
        assert assign == (1, 0)
        assert benefit == 17.0

    def test_rows_exceed_cols(self):
        with pytest.raises(ValueError):
            hungarian([[1.0], [2.0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            WeightMatrix(np.array([[np.inf, 1.0]]))

    def test_matches_brute_force_random(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(n, 7))
            w = rng.integers(-4, 10, size=(n, m)).astype(float)
            assign, benefit = hungarian(w)
            ref_assign, ref_benefit = brute_force_assignment(w)
            assert benefit == ref_benefit
            assert assign == ref_assign  # lexicographic tie-break matches

    def test_negative_weights(self):
        assign, benefit = hungarian([[-5.0, -1.0], [-2.0, -4.0]])
        assert assign == (1, 0)
        assert benefit == -3.0

    def test_weight_shift_covariance(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            w = rng.integers(0, 12, size=(n, n)).astype(float)
            assign, benefit = hungarian(w)
            shifted = w.copy()
            c = float(rng.integers(1, 9))
            row = int(rng.integers(0, n))
            shifted[row] += c
            assign2, benefit2 = hungarian(shifted)
            assert benefit2 == benefit + c
            assert assign2 == assign  # the optimum set is unchanged

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_optimality_property(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        m = int(rng.integers(n, 6))
        w = rng.uniform(-5, 10, size=(n, m))
        assign, benefit = hungarian(w)
        assert len(set(assign)) == n
        _, ref = brute_force_assignment(w)
        assert benefit == pytest.approx(ref, rel=1e-12, abs=1e-9)


class TestRuntimeGrowth:
    def test_solver_scaling(self):
        # log-log growth slope stays cubic-ish for both solvers
        sizes = (32, 64, 128, 256)
        rng = np.random.default_rng(4)
        hung_t, match_t = [], []
        for n in sizes:
            w = rng.uniform(0, 100, size=(n, n))
            t0 = time.perf_counter()
            hungarian(w)
            hung_t.append(time.perf_counter() - t0)
            edges = []
            for u in range(n):
                for v in rng.choice(n, size=6, replace=False):
                    if u < v:
                        edges.append((u, int(v), float(rng.uniform(0, 50))))
            g = WeightedGraph(n, tuple(edges))
            t0 = time.perf_counter()
            max_weight_matching(g)
            match_t.append(time.perf_counter() - t0)
        for times in (hung_t, match_t):
            slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
            assert slope <= 3.5
