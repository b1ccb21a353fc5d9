"""Backend parity: the compiled kernels must reproduce the pure-Python
results bit for bit (merge sequences, modularity values, triangle counts)."""

import numpy as np
import pytest

from ktmap._kernels import _pure
from ktmap.synth import PlantedConfig, gen_planted_kt_network, gen_random_graph

speedups = pytest.importorskip(
    "ktmap._kernels._speedups",
    reason="compiled kernels not built; parity tests need them")


def graphs():
    for seed in range(6):
        yield gen_random_graph(60, 0.08, seed).projection
    cfg = PlantedConfig(branching=(3,), leaf_size=30, p_within=(0.2,),
                        p_between=0.01)
    for seed in range(3):
        yield gen_planted_kt_network(cfg, seed)[0].projection


class TestParity:
    def test_greedy_merge_bit_identical(self):
        for g in graphs():
            eu, ev, ew = g.edge_arrays()
            if not eu:
                continue
            q0_p, merges_p, qs_p = _pure.greedy_merge_seq(g.n_nodes, eu, ev, ew)
            q0_c, merges_c, qs_c = speedups.greedy_merge_seq(g.n_nodes, eu, ev, ew)
            assert q0_p == q0_c
            assert merges_p == merges_c
            assert qs_p == qs_c  # exact float equality, not approx

    def test_triangle_counts_identical(self):
        for g in graphs():
            adj = g.adjacency_sorted()
            assert _pure.triangle_counts(adj) == speedups.triangle_counts(adj)

    def test_weighted_parity(self):
        rng = np.random.default_rng(42)
        n = 40
        edges = [(i, j, float(rng.integers(1, 5)))
                 for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.1]
        eu = [e[0] for e in edges]
        ev = [e[1] for e in edges]
        ew = [e[2] for e in edges]
        assert (_pure.greedy_merge_seq(n, eu, ev, ew)
                == speedups.greedy_merge_seq(n, eu, ev, ew))

    def test_no_edges_raises_in_both(self):
        with pytest.raises(ValueError):
            _pure.greedy_merge_seq(3, [], [], [])
        with pytest.raises(ValueError):
            speedups.greedy_merge_seq(3, [], [], [])
