import numpy as np
import pytest

from ktmap.corpus import UGraph
from ktmap.errors import InsufficientDataError
from ktmap.fronts import fast_greedy, hierarchical_fronts, modularity
from ktmap.synth import PlantedConfig, gen_planted_kt_network, nmi

from conftest import best_partition_bruteforce, brute_modularity, ugraph


def random_ugraph(rng, n_min=4, n_max=8):
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        p = float(rng.uniform(0.2, 0.9))
        ids = [f"v{i}" for i in range(n)]
        edges = [(ids[i], ids[j]) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < p]
        if edges:
            return ugraph(edges, extra_nodes=ids)


class TestModularity:
    def test_single_front_is_zero(self, two_triangles):
        q = modularity(two_triangles, {v: 1 for v in two_triangles.ids})
        assert q == pytest.approx(0.0, abs=1e-15)

    def test_two_triangles_half(self, two_triangles):
        part = {"a": 1, "b": 1, "c": 1, "d": 2, "e": 2, "f": 2}
        assert modularity(two_triangles, part) == pytest.approx(0.5, abs=1e-15)

    def test_splitting_a_triangle_hurts(self, two_triangles):
        part = {"a": 1, "b": 1, "c": 3, "d": 2, "e": 2, "f": 2}
        assert modularity(two_triangles, part) < 0.5

    def test_empty_graph_rejected(self):
        with pytest.raises(InsufficientDataError):
            modularity(UGraph(["a", "b"]), {"a": 1, "b": 1})

    def test_uncovered_node_rejected(self, two_triangles):
        with pytest.raises(ValueError):
            modularity(two_triangles, {"a": 1})

    def test_matches_matrix_definition_on_random_graphs(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            g = random_ugraph(rng)
            labels = {v: int(rng.integers(0, 3)) for v in g.ids}
            assert modularity(g, labels) == pytest.approx(
                brute_modularity(g, labels), abs=1e-12)

    def test_weighted_modularity(self):
        g = UGraph(["a", "b", "c", "d"],
                   [("a", "b", 3.0), ("c", "d", 3.0), ("b", "c", 1.0)])
        part = {"a": 1, "b": 1, "c": 2, "d": 2}
        # m=7, e_11 = e_22 = 3/7, a_1 = a_2 = 7/14
        expected = 2 * (3 / 7 - 0.25)
        assert modularity(g, part) == pytest.approx(expected, abs=1e-12)


class TestFastGreedy:
    def test_two_triangles_recovered(self, two_triangles):
        part = fast_greedy(two_triangles)
        fronts = set(part.fronts().values())
        assert fronts == {("a", "b", "c"), ("d", "e", "f")}
        assert part.q == pytest.approx(0.5, abs=1e-15)

    def test_complete_graph_single_front(self):
        ids = list("abcde")
        g = ugraph([(u, v) for i, u in enumerate(ids) for v in ids[i + 1:]])
        assert fast_greedy(g).n_fronts == 1

    def test_isolated_nodes_become_singletons(self, two_triangles):
        g = ugraph(list({(u, v) for u, v, _ in two_triangles.edges()}),
                   extra_nodes=["x", "y"])
        part = fast_greedy(g)
        assert part.assignment["x"] != part.assignment["y"]
        assert {len(m) for m in part.fronts().values()} == {1, 3}

    def test_empty_graph_rejected(self):
        with pytest.raises(InsufficientDataError):
            fast_greedy(UGraph(["a"]))

    def test_q_matches_recomputation(self, two_triangles):
        part = fast_greedy(two_triangles)
        assert part.q == pytest.approx(
            modularity(two_triangles, part.assignment), abs=1e-12)

    def test_beats_trivial_partitions(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            g = random_ugraph(rng)
            part = fast_greedy(g)
            singleton = {v: i for i, v in enumerate(g.ids)}
            allinone = {v: 1 for v in g.ids}
            assert part.q >= modularity(g, singleton) - 1e-12
            assert part.q >= modularity(g, allinone) - 1e-12

    def test_near_optimal_on_small_graphs(self):
        rng = np.random.default_rng(123)
        for _ in range(25):
            g = random_ugraph(rng)
            part = fast_greedy(g)
            q_best, _ = best_partition_bruteforce(g)
            assert part.q >= 0.9 * q_best - 1e-12

    def test_deterministic_across_runs(self):
        cfg = PlantedConfig(branching=(3,), leaf_size=20, p_within=(0.3,),
                            p_between=0.02)
        net, _ = gen_planted_kt_network(cfg, 5)
        parts = [fast_greedy(net.projection) for _ in range(3)]
        assert parts[0].assignment == parts[1].assignment == parts[2].assignment
        assert parts[0].q == parts[1].q == parts[2].q

    def test_planted_recovery_low_mixing(self):
        cfg = PlantedConfig(branching=(4,), leaf_size=30, p_within=(0.4,),
                            p_between=0.01)
        hits = 0
        for seed in range(5):
            net, truth = gen_planted_kt_network(cfg, seed)
            part = fast_greedy(net.projection)
            hits += nmi(part.assignment, truth.leaf_labels()) >= 0.9
        assert hits >= 4


class TestHierarchicalFronts:
    def two_level_cliques(self, k=6):
        """Two weakly linked copies of two strongly linked k-cliques.

        The sibling cliques inside each half share 12 links: enough that the
        flat modularity optimum is the two halves (the mid-level links must
        carry more than ~a quarter of the edge weight), while each half
        still splits cleanly into its cliques one level down.
        """
        edges = []
        blocks = []
        for b in range(4):
            ids = [f"b{b}n{i}" for i in range(k)]
            blocks.append(ids)
            edges += [(ids[i], ids[j]) for i in range(k) for j in range(i + 1, k)]
        for left, right in ((blocks[0], blocks[1]), (blocks[2], blocks[3])):
            edges += [(left[i], right[j]) for i in range(4) for j in range(3)]
        edges += [(blocks[0][5], blocks[2][5])]
        return ugraph(edges), blocks

    def test_nested_cliques_depth3(self):
        g, blocks = self.two_level_cliques()
        tree = hierarchical_fronts(g, max_depth=4, min_front_size=4,
                                   min_q_gain=0.05)
        assert tree.depth() == 3
        level2 = tree.fronts_at(2)
        assert sorted(len(f.members) for f in level2) == [12, 12]
        leaves = {tuple(sorted(f.members)) for f in tree.fronts_at(3)}
        assert leaves == {tuple(sorted(b)) for b in blocks}

    def test_min_front_size_floor(self, two_triangles):
        tree = hierarchical_fronts(two_triangles, min_front_size=4)
        assert tree.depth() == 2  # triangles too small to re-split
        assert len(tree.fronts_at(2)) == 2

    def test_max_depth_two_equals_flat(self, two_triangles):
        tree = hierarchical_fronts(two_triangles, max_depth=2, min_front_size=2)
        flat = fast_greedy(two_triangles)
        level2 = {tuple(sorted(f.members)) for f in tree.fronts_at(2)}
        assert level2 == set(flat.fronts().values())

    def test_refinement_property(self):
        g, _ = self.two_level_cliques()
        tree = hierarchical_fronts(g, max_depth=4, min_front_size=4,
                                   min_q_gain=0.05)
        for node in tree.root.walk():
            for child in node.children:
                assert set(child.members) <= set(node.members)
        # leaves partition the node set
        leaves = [m for n in tree.root.walk() if n.is_leaf for m in n.members]
        assert sorted(leaves) == sorted(g.ids)

    def test_node_paths_match_leaves(self):
        g, _ = self.two_level_cliques()
        tree = hierarchical_fronts(g, max_depth=4, min_front_size=4,
                                   min_q_gain=0.05)
        paths = tree.node_paths()
        for node in tree.root.walk():
            if node.is_leaf:
                for m in node.members:
                    assert paths[m] == node.path

    def test_planted_nested_recovery(self):
        cfg = PlantedConfig(branching=(2, 2), leaf_size=50,
                            p_within=(0.20, 0.50), p_between=0.01)
        net, truth = gen_planted_kt_network(cfg, 1)
        tree = hierarchical_fronts(net.projection, max_depth=3,
                                   min_front_size=10, min_q_gain=0.05)
        assert nmi(tree.level_assignment(2), truth.level_labels(1)) >= 0.9
        assert nmi(tree.level_assignment(3), truth.leaf_labels()) >= 0.9

    def test_empty_graph_rejected(self):
        with pytest.raises(InsufficientDataError):
            hierarchical_fronts(UGraph(["a", "b"]))
