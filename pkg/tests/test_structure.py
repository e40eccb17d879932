import itertools
import math

import numpy as np
import pytest

from socialrhythms.network import WeightedGraph
from socialrhythms.rhythm import RhythmVector, normalize
from socialrhythms.structure import (
    Partition,
    StructureError,
    UnknownNode,
    community_similarity_vs_clustering,
    detect_communities,
    mean_pairwise_similarity,
    modularity,
    weighted_clustering_coefficient,
)


def graph(edges, week=0):
    g = WeightedGraph(week=week)
    for a, b, w in edges:
        g.add_edge(a, b, w)
    return g


def two_cliques(clique_w=10_000.0, bridge_w=1.0):
    g = WeightedGraph()
    left = [f"l{i}" for i in range(5)]
    right = [f"r{i}" for i in range(5)]
    for group in (left, right):
        for a, b in itertools.combinations(group, 2):
            g.add_edge(a, b, clique_w)
    g.add_edge(left[0], right[0], bridge_w)
    return g, left, right


class TestModularity:
    def test_single_edge_one_community_beats_split(self):
        g = graph([("a", "b", 5.0)])
        assert modularity(g, {"a": 0, "b": 0}) == pytest.approx(0.0)
        assert modularity(g, {"a": 0, "b": 1}) == pytest.approx(-0.5)

    def test_hand_computed_path(self):
        # path a-b-c with weights 1 and 3; communities {a,b} {c}
        g = graph([("a", "b", 1.0), ("b", "c", 3.0)])
        w = 4.0
        intra = 1.0
        tot_ab = 1.0 + 4.0
        tot_c = 3.0
        want = intra / w - (tot_ab / (2 * w)) ** 2 - (tot_c / (2 * w)) ** 2
        assert modularity(g, {"a": 0, "b": 0, "c": 1}) == pytest.approx(want)


class TestDetectCommunities:
    def test_two_cliques_recovered(self):
        g, left, right = two_cliques()
        part = detect_communities(g, seed=0)
        groups = {frozenset(c) for c in (set(m) for m in part.communities())}
        assert groups == {frozenset(left), frozenset(right)}

    def test_clique_split_beats_alternatives(self):
        g, left, right = two_cliques()
        detected = detect_communities(g, seed=0).membership
        q_detected = modularity(g, detected)
        nodes = sorted(g.nodes)
        q_single = modularity(g, {u: 0 for u in nodes})
        q_singletons = modularity(g, {u: i for i, u in enumerate(nodes)})
        assert q_detected > q_single
        assert q_detected > q_singletons
        # moving any single node across the bridge never helps
        for u in nodes:
            for target in set(detected.values()):
                if detected[u] == target:
                    continue
                moved = dict(detected)
                moved[u] = target
                assert modularity(g, moved) <= q_detected + 1e-12

    def test_beats_singleton_partition(self):
        rng = np.random.default_rng(3)
        g = WeightedGraph()
        for i in range(25):
            for j in range(i + 1, 25):
                if rng.random() < 0.2:
                    g.add_edge(f"u{i}", f"u{j}", float(rng.integers(1, 100)))
        part = detect_communities(g, seed=1)
        q_singletons = modularity(g, {u: i for i, u in enumerate(sorted(g.nodes))})
        assert modularity(g, part.membership) >= q_singletons

    def test_single_edge_merges(self):
        part = detect_communities(graph([("a", "b", 7.0)]), seed=0)
        assert part.n_communities == 1

    def test_disconnected_components_never_merge(self):
        g = graph([("a", "b", 5.0), ("c", "d", 5.0), ("e", "f", 5.0)])
        part = detect_communities(g, seed=0)
        for x, y in (("a", "c"), ("a", "e"), ("c", "e")):
            assert part.membership[x] != part.membership[y]

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(4)
        g = WeightedGraph()
        for i in range(40):
            for j in range(i + 1, 40):
                if rng.random() < 0.15:
                    g.add_edge(f"u{i}", f"u{j}", float(rng.integers(1, 50)))
        assert detect_communities(g, seed=9).membership == detect_communities(g, seed=9).membership

    def test_relabel_invariance(self):
        g, left, right = two_cliques()
        mapping = {u: f"x{u}" for u in g.nodes}
        g2 = WeightedGraph()
        for a, b, w in g.edges():
            g2.add_edge(mapping[a], mapping[b], w)
        p1 = detect_communities(g, seed=0)
        p2 = detect_communities(g2, seed=0)
        groups1 = {frozenset(mapping[u] for u in c) for c in map(set, p1.communities())}
        groups2 = {frozenset(c) for c in map(set, p2.communities())}
        assert groups1 == groups2

    def test_empty_graph_rejected(self):
        with pytest.raises(StructureError):
            detect_communities(WeightedGraph(), seed=0)


def wcc_oracle(g, i):
    """Direct double sum over ordered neighbour pairs."""
    nbrs = g.neighbors(i)
    d = len(nbrs)
    if d <= 1:
        return 0.0
    total = 0.0
    for j in nbrs:
        for k in nbrs:
            if j == k:
                continue
            if g.has_edge(j, k):
                total += (g.weight(i, j) + g.weight(i, k)) / 2.0
    return total / (g.strength(i) * (d - 1))


class TestWeightedClustering:
    def test_equal_weight_triangle(self):
        g = graph([("a", "b", 7.0), ("b", "c", 7.0), ("a", "c", 7.0)])
        for u in "abc":
            assert weighted_clustering_coefficient(g, u) == pytest.approx(1.0)

    def test_star_center_zero(self):
        g = graph([("hub", f"s{i}", 3.0) for i in range(5)])
        assert weighted_clustering_coefficient(g, "hub") == 0.0

    def test_leaf_zero(self):
        g = graph([("a", "b", 1.0)])
        assert weighted_clustering_coefficient(g, "a") == 0.0

    def test_hand_evaluated_four_nodes(self):
        # i connected to j, k, l; one closed pair (j, k)
        g = graph([("i", "j", 2.0), ("i", "k", 4.0), ("i", "l", 6.0), ("j", "k", 9.0)])
        want = (2.0 + 4.0) / (12.0 * 2.0)
        assert weighted_clustering_coefficient(g, "i") == pytest.approx(want)

    def test_matches_oracle_on_random_graphs(self):
        rng = np.random.default_rng(6)
        for trial in range(100):
            g = WeightedGraph()
            for i in range(8):
                for j in range(i + 1, 8):
                    if rng.random() < 0.45:
                        g.add_edge(f"u{i}", f"u{j}", float(rng.uniform(0.5, 100)))
            for u in g.nodes:
                got = weighted_clustering_coefficient(g, u)
                assert got == pytest.approx(wcc_oracle(g, u), abs=1e-12)
                assert 0.0 <= got <= 1.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(7)
        g = WeightedGraph()
        for i in range(10):
            for j in range(i + 1, 10):
                if rng.random() < 0.4:
                    g.add_edge(f"u{i}", f"u{j}", float(rng.uniform(1, 50)))
        scaled = WeightedGraph()
        for a, b, w in g.edges():
            scaled.add_edge(a, b, 17.5 * w)
        for u in g.nodes:
            assert weighted_clustering_coefficient(g, u) == pytest.approx(
                weighted_clustering_coefficient(scaled, u), abs=1e-12)

    def test_unknown_node(self):
        with pytest.raises(UnknownNode):
            weighted_clustering_coefficient(graph([("a", "b", 1.0)]), "zzz")


def rhythm_at(angle, user=None):
    v = np.zeros(24)
    v[0], v[1] = math.cos(angle), math.sin(angle)
    return RhythmVector(v, user=user)


class TestCommunityStats:
    def test_identical_rhythms_similarity_one(self):
        g = graph([("a", "b", 10.0), ("b", "c", 10.0), ("a", "c", 10.0)])
        part = Partition({"a": 0, "b": 0, "c": 0})
        rhythms = {u: rhythm_at(0.5) for u in "abc"}
        report = community_similarity_vs_clustering(g, part, rhythms, min_size=3)
        assert len(report.stats) == 1
        assert report.stats[0].mean_similarity == pytest.approx(1.0)
        assert report.stats[0].mean_wcc == pytest.approx(1.0)

    def test_two_member_community_is_the_pair_cosine(self):
        g = graph([("a", "b", 10.0)])
        part = Partition({"a": 0, "b": 0})
        rhythms = {"a": rhythm_at(0.0), "b": rhythm_at(1.0)}
        report = community_similarity_vs_clustering(g, part, rhythms, min_size=2)
        assert report.stats[0].mean_similarity == pytest.approx(math.cos(1.0))

    def test_undersized_skipped_and_counted(self):
        g = graph([("a", "b", 1.0), ("c", "d", 1.0), ("d", "e", 1.0), ("c", "e", 1.0)])
        part = Partition({"a": 0, "b": 0, "c": 1, "d": 1, "e": 1})
        rhythms = {u: rhythm_at(0.1) for u in "abcde"}
        report = community_similarity_vs_clustering(g, part, rhythms, min_size=3)
        assert report.skipped == 1
        assert [s.size for s in report.stats] == [3]

    def test_identity_matches_pairwise_brute_force(self):
        rng = np.random.default_rng(8)
        rhythms = [normalize(rng.normal(size=24)) for _ in range(12)]
        fast = mean_pairwise_similarity(rhythms)
        brute = np.mean([float(np.dot(a.values, b.values))
                         for a, b in itertools.combinations(rhythms, 2)])
        assert fast == pytest.approx(brute, abs=1e-12)
