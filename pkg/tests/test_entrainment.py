import math

import mpmath
import numpy as np
import pytest

from socialrhythms.binning import BinnedCurve, similarity_bin_edges
from socialrhythms.entrainment import (
    MissingRhythm,
    NonAdjacentWeeks,
    PairObservation,
    TooFewSamples,
    TriadCondition,
    TriadObservation,
    UserMismatch,
    ZeroVariance,
    change_curve,
    intrapersonal_similarity,
    new_edges,
    null_pair_observations,
    similarity_distributions,
    similarity_vs_weight_curve,
    triad_change_summary,
    triad_extract,
    welch_t,
)
from socialrhythms.network import WeightedGraph
from socialrhythms.rhythm import RhythmVector, normalize


def unit_vector(angle: float, user=None, week=None) -> RhythmVector:
    """Unit 24-vector in the plane of axes 0 and 1, at the given angle."""
    v = np.zeros(24)
    v[0] = math.cos(angle)
    v[1] = math.sin(angle)
    return RhythmVector(v, user=user, week=week)


def graph(edges, week=0):
    g = WeightedGraph(week=week)
    for a, b, w in edges:
        g.add_edge(a, b, w)
    return g


class TestSimilarityVsWeightCurve:
    def test_identical_rhythms_give_unit_means(self):
        g = graph([("a", "b", 100.0), ("c", "d", 5000.0)])
        r = unit_vector(0.3)
        rhythms = {u: r for u in "abcd"}
        result = similarity_vs_weight_curve(g, rhythms, seed=0)
        assert np.allclose(result.curve.means[result.curve.populated()], 1.0)
        assert result.baseline_mean == pytest.approx(1.0)

    def test_empty_graph(self):
        result = similarity_vs_weight_curve(WeightedGraph(), {}, seed=0)
        assert result.curve.counts.sum() == 0

    def test_missing_rhythm_listed(self):
        g = graph([("a", "b", 10.0), ("b", "c", 10.0)])
        with pytest.raises(MissingRhythm) as err:
            similarity_vs_weight_curve(g, {"a": unit_vector(0.0)}, seed=0)
        assert err.value.missing == ["b", "c"]

    def test_constructed_cosines_recovered(self):
        # disjoint edges, each pair built by rotation to hit an exact target
        edges = []
        rhythms = {}
        bin_edges = np.arange(2.0, 4.4001, 0.2)
        targets = {}
        for i, center in enumerate(0.5 * (bin_edges[:-1] + bin_edges[1:])):
            target = min(0.2 * max(center - 3.1, 0.0) + 0.65, 0.999)
            a, b = f"a{i}", f"b{i}"
            w = 10.0 ** center
            edges.append((a, b, w))
            rhythms[a] = unit_vector(0.0, user=a)
            rhythms[b] = unit_vector(math.acos(target), user=b)
            targets[i] = target
        result = similarity_vs_weight_curve(graph(edges), rhythms, bin_edges, seed=0)
        for i, target in targets.items():
            assert result.curve.counts[i] == 1
            assert result.curve.means[i] == pytest.approx(target, abs=1e-12)


class TestNewEdges:
    def test_identical_graphs_empty(self):
        g0 = graph([("a", "b", 10.0)], week=0)
        g1 = graph([("a", "b", 20.0)], week=1)
        r = {u: unit_vector(0.1, user=u) for u in "ab"}
        assert new_edges(g0, g1, r, r) == []

    def test_single_new_pair(self):
        g0 = WeightedGraph(week=0)
        g0.add_node("a")
        g1 = graph([("a", "b", 700.0)], week=1)
        r0 = {u: unit_vector(0.2, user=u, week=0) for u in "ab"}
        r1 = {u: unit_vector(0.4, user=u, week=1) for u in "ab"}
        obs = new_edges(g0, g1, r0, r1)
        assert len(obs) == 1
        assert obs[0].pair == ("a", "b")
        assert obs[0].weight_after == 700.0
        assert obs[0].sim_before == pytest.approx(1.0)

    def test_requires_rhythms_in_both_weeks(self):
        g0 = WeightedGraph(week=0)
        g1 = graph([("a", "b", 700.0)], week=1)
        r1 = {u: unit_vector(0.0, user=u) for u in "ab"}
        assert new_edges(g0, g1, {}, r1) == []

    def test_non_adjacent_weeks(self):
        with pytest.raises(NonAdjacentWeeks):
            new_edges(WeightedGraph(week=0), WeightedGraph(week=2), {}, {})

    def test_matches_nested_loop_oracle(self):
        rng = np.random.default_rng(21)
        nodes = [f"u{i}" for i in range(15)]
        rhythms = {u: unit_vector(rng.uniform(0, 2 * math.pi), user=u) for u in nodes}

        def random_graph(week, seed):
            r = np.random.default_rng(seed)
            g = WeightedGraph(week=week)
            for i in range(len(nodes)):
                for j in range(i + 1, len(nodes)):
                    if r.random() < 0.25:
                        g.add_edge(nodes[i], nodes[j], float(r.integers(1, 1000)))
            return g

        g0, g1 = random_graph(0, 1), random_graph(1, 2)
        got = {o.pair for o in new_edges(g0, g1, rhythms, rhythms)}
        want = set()
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                a, b = nodes[i], nodes[j]
                if g1.has_edge(a, b) and not g0.has_edge(a, b):
                    want.add(tuple(sorted((a, b))))
        assert got == want


def make_obs(sim_before, sim_after, weight=2000.0):
    return PairObservation(("a", "b"), 0, 1, sim_before, sim_after, weight)


class TestChangeCurve:
    def test_unchanged_sims_on_diagonal(self):
        rng = np.random.default_rng(22)
        obs = [make_obs(s, s) for s in rng.uniform(-1, 1, 200)]
        curve = change_curve(obs)
        for c, m, n in zip(curve.centers, curve.means, curve.counts):
            if n:
                assert abs(m - c) <= 0.025 + 1e-12  # within half a bin width

    def test_single_observation(self):
        curve = change_curve([make_obs(0.32, 0.5)])
        idx = int(np.flatnonzero(curve.counts)[0])
        assert curve.counts.sum() == 1
        assert curve.means[idx] == pytest.approx(0.5)
        assert curve.sds[idx] == 0.0
        assert curve.edges[idx] <= 0.32 < curve.edges[idx + 1]

    def test_known_bin_means_exact(self):
        obs = [make_obs(0.31, 0.4), make_obs(0.33, 0.6), make_obs(0.72, 0.9)]
        curve = change_curve(obs)
        edges = similarity_bin_edges()
        bin_a = int(np.searchsorted(edges, 0.31, side="right") - 1)
        bin_b = int(np.searchsorted(edges, 0.72, side="right") - 1)
        assert curve.means[bin_a] == pytest.approx(0.5)
        assert curve.sds[bin_a] == pytest.approx(0.1)
        assert curve.means[bin_b] == pytest.approx(0.9)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(23)
        obs = [make_obs(float(a), float(b)) for a, b in rng.uniform(-1, 1, (50, 2))]
        c1 = change_curve(obs)
        c2 = change_curve(obs[::-1])
        np.testing.assert_array_equal(c1.counts, c2.counts)
        np.testing.assert_allclose(c1.means[c1.populated()], c2.means[c2.populated()], atol=1e-12)


class TestDistributions:
    def test_identical_sets_identical_histograms(self):
        obs = [make_obs(0.2, 0.2), make_obs(0.5, 0.5), make_obs(-0.1, -0.1)]
        d = similarity_distributions(obs, obs)
        np.testing.assert_array_equal(d.before.counts, d.after.counts)
        assert d.before.mean == pytest.approx(d.after.mean)

    def test_single_pair(self):
        d = similarity_distributions([make_obs(0.4, 0.6)], [make_obs(0.1, 0.2)])
        assert d.before.counts.sum() == 1
        assert d.after.counts.sum() == 1
        assert d.null.counts.sum() == 1
        assert d.null.mean == pytest.approx(0.2)


class TestIntrapersonal:
    def test_unchanged_rhythm(self):
        r0 = unit_vector(0.3, user="u", week=0)
        r1 = unit_vector(0.3, user="u", week=1)
        assert intrapersonal_similarity("u", r0, r1) == pytest.approx(1.0)

    def test_orthogonal(self):
        r0 = unit_vector(0.0, user="u", week=0)
        r1 = unit_vector(math.pi / 2, user="u", week=1)
        assert intrapersonal_similarity("u", r0, r1) == pytest.approx(0.0, abs=1e-12)

    def test_user_mismatch(self):
        with pytest.raises(UserMismatch):
            intrapersonal_similarity("u", unit_vector(0, user="u", week=0),
                                     unit_vector(0, user="v", week=1))

    def test_non_adjacent_weeks(self):
        with pytest.raises(NonAdjacentWeeks):
            intrapersonal_similarity("u", unit_vector(0, user="u", week=0),
                                     unit_vector(0, user="u", week=5))


class TestTriadExtract:
    def rhythms(self, users, week):
        return {u: unit_vector(0.1 * i, user=u, week=week) for i, u in enumerate(users)}

    def test_open_path_unconnected(self):
        g0 = graph([("a", "c", 500.0)], week=0)
        g1 = graph([("a", "c", 500.0), ("a", "b", 900.0)], week=1)
        r0 = self.rhythms("abc", 0)
        r1 = self.rhythms("abc", 1)
        triads = triad_extract(g0, g1, r0, r1)
        assert len(triads) == 1
        t = triads[0]
        assert (t.a, t.b, t.c) == ("a", "b", "c")
        assert t.bc_condition is TriadCondition.UNCONNECTED

    def test_triangle_strong(self):
        g0 = graph([("a", "c", 500.0), ("b", "c", 10_000.0)], week=0)
        g1 = graph([("a", "c", 500.0), ("b", "c", 10_000.0), ("a", "b", 70.0)], week=1)
        triads = triad_extract(g0, g1, self.rhythms("abc", 0), self.rhythms("abc", 1))
        by_role = {(t.a, t.b, t.c): t for t in triads}
        # orientation A=a: C=c via a-c; B-C = b-c strong
        assert by_role[("a", "b", "c")].bc_condition is TriadCondition.STRONG_EDGE
        # orientation A=b: C=c via b-c; B-C = a-c weak
        assert by_role[("b", "a", "c")].bc_condition is TriadCondition.WEAK_EDGE

    def test_matches_brute_force_enumeration(self):
        rng = np.random.default_rng(31)
        nodes = [f"u{i:02d}" for i in range(30)]
        rhythms = {u: unit_vector(rng.uniform(0, 2 * math.pi), user=u) for u in nodes}

        def random_graph(week, seed):
            r = np.random.default_rng(seed)
            g = WeightedGraph(week=week)
            for i in range(len(nodes)):
                for j in range(i + 1, len(nodes)):
                    if r.random() < 0.15:
                        g.add_edge(nodes[i], nodes[j], float(10 ** r.uniform(2, 4)))
            return g

        g0, g1 = random_graph(0, 5), random_graph(1, 6)
        got = {(t.a, t.b, t.c, t.bc_condition) for t in triad_extract(g0, g1, rhythms, rhythms)}

        want = set()
        cutoff = 10 ** 3.1
        for x in nodes:  # brute force over all ordered (A, B, C) triples
            for y in nodes:
                for c in nodes:
                    if len({x, y, c}) != 3:
                        continue
                    if not (g1.has_edge(x, y) and not g0.has_edge(x, y)):
                        continue
                    if not g0.has_edge(x, c):
                        continue
                    w_bc = g0.weight(y, c)
                    if w_bc is None:
                        cond = TriadCondition.UNCONNECTED
                    elif w_bc > cutoff:
                        cond = TriadCondition.STRONG_EDGE
                    else:
                        cond = TriadCondition.WEAK_EDGE
                    want.add((x, y, c, cond))
        assert got == want

    def test_orientation_symmetry(self):
        # relabeling the two endpoints of the new edge leaves the triad set invariant
        g0 = graph([("a", "c", 500.0), ("b", "d", 700.0)], week=0)
        g1 = graph([("a", "c", 500.0), ("b", "d", 700.0), ("a", "b", 100.0)], week=1)
        r0 = self.rhythms("abcd", 0)
        r1 = self.rhythms("abcd", 1)
        triads = {(t.a, t.b, t.c) for t in triad_extract(g0, g1, r0, r1)}
        assert triads == {("a", "b", "c"), ("b", "a", "d")}


class TestTriadChangeSummary:
    def test_grouped_and_diagonal(self):
        triads = [
            TriadObservation("a", "b", "c", TriadCondition.STRONG_EDGE, 0.4, 0.4, 0.6, 0.6),
            TriadObservation("a", "b", "d", TriadCondition.UNCONNECTED, 0.2, 0.2, 0.3, 0.3),
        ]
        curves = triad_change_summary(triads)
        assert curves[TriadCondition.STRONG_EDGE].n == 1
        assert curves[TriadCondition.WEAK_EDGE].n == 0
        strong_ac = curves[TriadCondition.STRONG_EDGE].ac
        idx = int(np.flatnonzero(strong_ac.counts)[0])
        assert strong_ac.means[idx] == pytest.approx(0.4)

    def test_known_means_exact(self):
        triads = [
            TriadObservation("a", "b", "c", TriadCondition.WEAK_EDGE, 0.31, 0.5, 0.31, 0.7),
            TriadObservation("x", "y", "z", TriadCondition.WEAK_EDGE, 0.33, 0.7, 0.33, 0.9),
        ]
        curves = triad_change_summary(triads)
        weak = curves[TriadCondition.WEAK_EDGE]
        idx = int(np.flatnonzero(weak.ac.counts)[0])
        assert weak.ac.means[idx] == pytest.approx(0.6)
        assert weak.bc.means[idx] == pytest.approx(0.8)


def welch_oracle(x, y):
    """Arbitrary-precision Welch t, dof and two-sided p via mpmath."""
    with mpmath.workdps(60):
        xs = [mpmath.mpf(float(v)) for v in x]
        ys = [mpmath.mpf(float(v)) for v in y]
        nx, ny = len(xs), len(ys)
        mx = mpmath.fsum(xs) / nx
        my = mpmath.fsum(ys) / ny
        vx = mpmath.fsum((v - mx) ** 2 for v in xs) / (nx - 1)
        vy = mpmath.fsum((v - my) ** 2 for v in ys) / (ny - 1)
        se2 = vx / nx + vy / ny
        t = (mx - my) / mpmath.sqrt(se2)
        dof = se2 ** 2 / ((vx / nx) ** 2 / (nx - 1) + (vy / ny) ** 2 / (ny - 1))
        if t == 0:
            p = mpmath.mpf(1)
        else:
            p = mpmath.betainc(dof / 2, mpmath.mpf(1) / 2,
                               0, dof / (dof + t ** 2), regularized=True)
        return float(t), float(dof), float(p)


class TestWelch:
    def test_identical_samples(self):
        r = welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert r.t == 0.0
        assert r.p == 1.0

    def test_known_pair(self):
        r = welch_t([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        t0, dof0, p0 = welch_oracle([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        assert r.t == pytest.approx(t0, abs=1e-12)
        assert r.dof == pytest.approx(dof0, abs=1e-12)
        assert r.p == pytest.approx(p0, abs=1e-10)

    def test_matches_oracle_on_random_samples(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            nx = int(rng.integers(2, 40))
            ny = int(rng.integers(2, 40))
            x = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), nx)
            y = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), ny)
            r = welch_t(x, y)
            t0, dof0, p0 = welch_oracle(x, y)
            assert r.t == pytest.approx(t0, abs=1e-10)
            assert r.p == pytest.approx(p0, abs=1e-8)

    def test_swap_antisymmetry(self):
        rng = np.random.default_rng(42)
        x = rng.normal(0, 1, 12)
        y = rng.normal(0.5, 2, 9)
        a = welch_t(x, y)
        b = welch_t(y, x)
        assert a.t == pytest.approx(-b.t, abs=1e-12)
        assert a.p == pytest.approx(b.p, abs=1e-12)

    def test_p_monotone_in_t(self):
        # fixed samples scaled to sweep |t| upward at identical dof
        x = np.array([0.0, 1.0, 2.0, 3.0])
        y = np.array([0.0, 1.0, 2.0, 3.0])
        previous = 1.0
        for shift in (0.1, 0.5, 1.0, 2.0, 5.0):
            p = welch_t(x + shift, y).p
            assert p < previous
            previous = p

    def test_errors(self):
        with pytest.raises(TooFewSamples):
            welch_t([1.0], [1.0, 2.0])
        with pytest.raises(ZeroVariance):
            welch_t([1.0, 1.0], [2.0, 2.0])


class TestNullPairObservations:
    def test_shape_and_weeks(self):
        rng = np.random.default_rng(51)
        nodes = [f"u{i}" for i in range(12)]
        rhythms0 = {u: unit_vector(rng.uniform(0, 6), user=u, week=0) for u in nodes}
        rhythms1 = {u: unit_vector(rng.uniform(0, 6), user=u, week=1) for u in nodes}
        g0 = WeightedGraph(week=0)
        g1 = WeightedGraph(week=1)
        for i in range(0, 10, 2):
            g0.add_edge(nodes[i], nodes[i + 1], float(rng.integers(100, 5000)))
            g1.add_edge(nodes[i], nodes[i + 1], float(rng.integers(100, 5000)))
        obs = null_pair_observations(g0, g1, rhythms0, rhythms1, seed=3)
        for o in obs:
            assert o.week_before == 0 and o.week_after == 1
        # reattachment is seed-deterministic
        again = null_pair_observations(g0, g1, rhythms0, rhythms1, seed=3)
        assert [o.pair for o in obs] == [o.pair for o in again]
