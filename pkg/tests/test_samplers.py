"""Samplers: exact laws at small sizes, weights, ensembles, determinism."""

from collections import Counter
from fractions import Fraction
from itertools import product
from math import sqrt

import numpy as np
import pytest

from surplus_lab.lattice_paths import (
    LatticeExcursion,
    enumerate_excursions,
    height_profile,
    tree_of_contour,
)
from surplus_lab.local_time import bf_weights, df_index_set, df_weights
from surplus_lab.samplers import (
    DegenerateEnsembleError,
    WeightedEnsemble,
    RngStream,
    RootedGraph,
    count_degenerate_tuples,
    decoration_count,
    degenerate_tuple_bound,
    enumerate_maps,
    enumerate_surplus_graphs,
    prufer_decode,
    sample_corners_bf,
    sample_corners_df,
    sample_labeled_tree,
    sample_map_decoration,
    sample_surplus_graph,
    sample_unicellular_decoration,
    sample_uniform_bridge,
    sample_uniform_excursion,
    spanning_tree_count,
    symmetrize,
    tilted_ensemble,
    w1_weight,
    ws_weight,
)

CHI2_CRIT = {8: 20.090, 13: 27.688}  # 1% upper tail, by degrees of freedom


def three_sigma(p: float, n: int) -> float:
    return 3.0 * sqrt(p * (1 - p) / n)


class TestUniformExcursion:
    def test_n1_point_mass(self):
        rng = RngStream(0)
        for r in range(5):
            assert sample_uniform_excursion(1, rng.substream(r)).as_tuple() == (0, 1, 0)

    def test_n3_binomial(self):
        rng = RngStream(101)
        reps = 30_000
        c = Counter(sample_uniform_excursion(3, rng.substream(r)).as_tuple()
                    for r in range(reps))
        assert set(c) == {f.as_tuple() for f in enumerate_excursions(3)}
        for v in c.values():
            assert abs(v / reps - 0.5) < three_sigma(0.5, reps)

    def test_chi2_uniform_f5(self):
        rng = RngStream(202)
        reps = 50_000
        c = Counter(sample_uniform_excursion(5, rng.substream(r)).as_tuple()
                    for r in range(reps))
        assert len(c) == 14
        expected = reps / 14.0
        chi2 = sum((v - expected) ** 2 / expected for v in c.values())
        assert chi2 < CHI2_CRIT[13]

    def test_bridge_sampler(self):
        b = sample_uniform_bridge(4, RngStream(5))
        assert b.values[0] == 0 and b.values[-1] == -1


class TestLabeledTree:
    def test_n1(self):
        t = sample_labeled_tree(1, RngStream(1))
        assert t.n == 1 and t.root == 1

    def test_n2_half_half(self):
        rng = RngStream(7)
        reps = 10_000
        c = Counter(sample_labeled_tree(2, rng.substream(r)).root for r in range(reps))
        assert abs(c[1] / reps - 0.5) < three_sigma(0.5, reps)

    def test_n3_chi2_over_nine(self):
        rng = RngStream(8)
        reps = 45_000
        c = Counter((t.root, tuple(t.parent))
                    for t in (sample_labeled_tree(3, rng.substream(r)) for r in range(reps)))
        assert len(c) == 9
        expected = reps / 9.0
        chi2 = sum((v - expected) ** 2 / expected for v in c.values())
        assert chi2 < CHI2_CRIT[8]

    def test_prufer_bijection(self):
        for n in (3, 4, 5):
            seen = set()
            for seq in product(range(1, n + 1), repeat=n - 2):
                edges = frozenset(frozenset(e) for e in prufer_decode(list(seq), n))
                assert len(edges) == n - 1
                seen.add(edges)
            assert len(seen) == n ** (n - 2)


class TestCornerSamplers:
    def test_bf_singleton(self):
        f = LatticeExcursion([0, 1, 0])
        xi = sample_corners_bf(f, 1, RngStream(3))
        assert xi.indices == (1, 1)

    def test_df_singleton(self):
        f = LatticeExcursion([0, 1, 0])
        xi = sample_corners_df(f, 1, RngStream(3))
        assert xi.indices == (1, 1)

    def test_bf_marginals(self):
        f = LatticeExcursion([0, 1, 2, 1, 0])
        rng = RngStream(11)
        reps = 40_000
        first = Counter()
        second_given_2 = Counter()
        for r in range(reps):
            xi = sample_corners_bf(f, 1, rng.substream(r))
            first[xi.indices[0]] += 1
            if xi.indices[0] == 2:
                second_given_2[xi.indices[1]] += 1
        for i, p in [(1, 0.4), (2, 0.4), (3, 0.2)]:
            assert abs(first[i] / reps - p) < three_sigma(p, reps)
        t2 = sum(second_given_2.values())
        for j in (2, 3):
            assert abs(second_given_2[j] / t2 - 0.5) < three_sigma(0.5, t2)

    def test_df_two_stage_equals_uniform_on_partner_set(self):
        rng = RngStream(13)
        for f in enumerate_excursions(4):
            reps = 20_000
            c = Counter()
            for r in range(reps):
                xi = sample_corners_df(f, 1, rng.substream(f.n, r))
                c[xi.indices] += 1
            dw = df_weights(f)
            for (i1, i2), cnt in c.items():
                p = (dw.per_index[i1] / dw.total) / len(df_index_set(f, i1))
                assert abs(cnt / reps - p) < max(three_sigma(p, reps), 5e-3)

    def test_sampled_decorations_validate(self):
        rng = RngStream(21)
        for r in range(50):
            f = sample_uniform_excursion(20, rng.substream(0, r))
            sample_corners_bf(f, 2, rng.substream(1, r)).validate(f)
            sample_corners_df(f, 2, rng.substream(2, r)).validate(f)


class TestUnicellularDecoration:
    def test_forced_pairing(self):
        f = LatticeExcursion([0, 1, 2, 1, 2, 1, 0])
        pairing, heights, corners = sample_unicellular_decoration(f, 1, RngStream(2))
        assert str(pairing) == "(1,3)(2,4)"
        assert len(corners) == 4

    def test_corner_uniformity(self):
        f = LatticeExcursion([0, 1, 2, 1, 2, 1, 0])
        rng = RngStream(31)
        reps = 30_000
        c = Counter(sample_unicellular_decoration(f, 1, rng.substream(r))[2]
                    for r in range(reps))
        assert set(c) == {(1, 2, 3, 4), (1, 2, 3, 5), (2, 3, 4, 5)}
        for v in c.values():
            assert abs(v / reps - 1 / 3) < three_sigma(1 / 3, reps)

    def test_heights_follow_corners(self):
        rng = RngStream(41)
        for r in range(100):
            f = sample_uniform_excursion(12, rng.substream(0, r))
            try:
                pairing, heights, corners = sample_unicellular_decoration(
                    f, 1, rng.substream(1, r))
            except DegenerateEnsembleError:
                continue
            for (a, b), h in zip(pairing.transpositions, heights):
                assert f.values[corners[a - 1]] == h
                assert 0 <= h - f.values[corners[b - 1]] <= 1

    def test_glued_samples_unicellular(self):
        from surplus_lab.maps import unicellular_glue

        rng = RngStream(43)
        for r in range(30):
            f = sample_uniform_excursion(10, rng.substream(0, r))
            try:
                pairing, _, corners = sample_unicellular_decoration(f, 1, rng.substream(1, r))
            except DegenerateEnsembleError:
                continue
            m, uni = unicellular_glue(tree_of_contour(f), pairing, corners, strict=True)
            assert uni and m.genus() == 1

    def test_degenerate(self):
        with pytest.raises(DegenerateEnsembleError):
            sample_unicellular_decoration(LatticeExcursion([0, 1, 2, 1, 0]), 1, RngStream(1))


class TestTiltedEnsemble:
    def test_s0_uniform(self):
        ens = tilted_ensemble(5, 0, "bf", 200, RngStream(5),
                              {"area": lambda smp: float(sum(smp.vals))})
        assert np.all(ens.weights == 1.0)
        assert ens.ess() == pytest.approx(200.0)

    def test_weights_match_definitions(self):
        ens_b = tilted_ensemble(6, 2, "bf", 50, RngStream(6), {})
        ens_d = tilted_ensemble(6, 2, "df", 50, RngStream(6), {})
        rng = RngStream(6)
        for r in range(50):
            f = sample_uniform_excursion(6, rng.substream(r))
            assert ens_b.weights[r] == bf_weights(f).total ** 2
            assert ens_d.weights[r] == df_weights(f).total ** 2

    def test_tilted_matches_enumeration(self):
        # weighted frequency of each shape tracks its exact tilted probability
        reps = 30_000
        ens = tilted_ensemble(4, 1, "bf", reps, RngStream(77),
                              {"key": lambda smp: float(hash(tuple(smp.vals)) % 997)})
        keys = {}
        weights = {}
        rng = RngStream(77)
        for r in range(reps):
            f = sample_uniform_excursion(4, rng.substream(r))
            k = f.as_tuple()
            weights[k] = weights.get(k, 0.0) + bf_weights(f).total
        total = sum(weights.values())
        exact = {f.as_tuple(): bf_weights(f).total for f in enumerate_excursions(4)}
        z = sum(exact.values())
        for k, wsum in weights.items():
            p_hat = wsum / total
            p = exact[k] / z
            assert abs(p_hat - p) < three_sigma(p, reps) + 0.01

    def test_um_point_mass_at_n3(self):
        ens = tilted_ensemble(3, 1, "um", 400, RngStream(8),
                              {"max": lambda smp: float(smp.exc.max_height())})
        # only the double-bump excursion carries weight (value 3), the tall one gets 0
        assert set(np.unique(ens.weights)) <= {0.0, 3.0}
        assert np.any(ens.weights == 3.0) and np.any(ens.weights == 0.0)
        est, _ = ens.estimate("max")
        assert est == pytest.approx(2.0)

    def test_um_degenerate_raises(self):
        with pytest.raises(DegenerateEnsembleError):
            tilted_ensemble(2, 1, "um", 50, RngStream(9), {})

    def test_determinism(self):
        a = tilted_ensemble(8, 1, "bf", 40, RngStream(123),
                            {"m": lambda smp: float(smp.exc.max_height())})
        b = tilted_ensemble(8, 1, "bf", 40, RngStream(123),
                            {"m": lambda smp: float(smp.exc.max_height())})
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.columns["m"], b.columns["m"])

    def test_ess_reasonable_at_tilt(self):
        ens = tilted_ensemble(200, 1, "bf", 500, RngStream(10),
                              {"m": lambda smp: float(smp.exc.max_height())})
        assert ens.ess() > 500 / 50


class TestMapSampling:
    def test_enumeration_counts(self):
        assert len(enumerate_maps(1, 1)) == 1
        assert len(enumerate_maps(2, 1)) == 5
        for n in range(1, 5):
            assert len(enumerate_maps(n, 0)) == len(enumerate_excursions(n))

    def test_bf_df_same_sets(self):
        for n in range(1, 5):
            for s in range(1, 3):
                bf = {m.canonical_key() for m in enumerate_maps(n, s, "bf")}
                df = {m.canonical_key() for m in enumerate_maps(n, s, "df")}
                assert bf == df

    def test_uniform_map_law_small(self):
        # weighted empirical law over canonical maps is uniform at n=3, s=1
        from surplus_lab.maps import insert_edges

        reps = 25_000
        rng = RngStream(55)
        acc = Counter()
        for r in range(reps):
            exc, xi, w = sample_map_decoration(3, 1, rng.substream(r))
            m = insert_edges(tree_of_contour(exc), xi, validate=False)
            acc[m.canonical_key()] += w
        universe = {m.canonical_key() for m in enumerate_maps(3, 1)}
        assert set(acc) == universe
        total = sum(acc.values())
        p = 1 / len(universe)
        for key, wsum in acc.items():
            assert abs(wsum / total - p) < three_sigma(p, reps) + 0.01

    def test_uniform_map_law_s2(self):
        from surplus_lab.maps import insert_edges

        reps = 25_000
        rng = RngStream(56)
        acc = Counter()
        for r in range(reps):
            exc, xi, w = sample_map_decoration(2, 2, rng.substream(r))
            m = insert_edges(tree_of_contour(exc), xi, validate=False)
            acc[m.canonical_key()] += w
        universe = {m.canonical_key() for m in enumerate_maps(2, 2)}
        assert set(acc) == universe
        total = sum(acc.values())
        p = 1 / len(universe)
        for key, wsum in acc.items():
            assert abs(wsum / total - p) < three_sigma(p, reps) + 0.01


class TestSurplusGraphs:
    def test_counts(self):
        assert len(enumerate_surplus_graphs(2, 1)) == 0
        assert len(enumerate_surplus_graphs(3, 1)) == 3
        for n in (2, 3, 4, 5):
            assert len(enumerate_surplus_graphs(n, 0)) == n ** (n - 1)

    def test_spanning_tree_counts(self):
        assert spanning_tree_count(3, [(1, 2), (2, 3), (1, 3)]) == 3
        k4 = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        assert spanning_tree_count(4, k4) == 16
        assert spanning_tree_count(4, [(1, 2), (2, 3), (3, 4)]) == 1
        assert spanning_tree_count(4, [(1, 2), (3, 4)]) == 0

    def test_no_simple_graph_error(self):
        with pytest.raises(DegenerateEnsembleError):
            sample_surplus_graph(2, 1, RngStream(3))

    def test_weighted_uniformity_n4_s1(self):
        reps = 30_000
        rng = RngStream(99)
        acc = Counter()
        for r in range(reps):
            g, w = sample_surplus_graph(4, 1, rng.substream(r))
            acc[g.key()] += w
        universe = {g.key() for g in enumerate_surplus_graphs(4, 1)}
        assert set(acc) == universe
        total = sum(acc.values())
        p = 1 / len(universe)
        for key, wsum in acc.items():
            assert abs(wsum / total - p) < three_sigma(p, reps) + 0.01


class TestSymmetrize:
    def test_surplus_zero_identity(self):
        tree_edges = frozenset({(1, 2), (2, 3)})
        g = RootedGraph(3, 1, tree_edges)
        res = symmetrize(g, RngStream(1))
        assert res.sbf.edges() == {frozenset(e) for e in tree_edges}
        assert res.sbar == res.sbf

    def test_triangle(self):
        g = RootedGraph(3, 1, frozenset({(1, 2), (1, 3), (2, 3)}))
        res = symmetrize(g, RngStream(1))
        assert res.sbf.parent[2] == 1 and res.sbf.parent[3] == 1
        assert res.surplus_pairs == ((2, 3),)
        assert res.sbar == res.sbf  # equal heights: no swap possible

    def test_swap_preserves_profile(self):
        # vertex 4 sits one level below surplus partner 3, so the swap can trigger
        g = RootedGraph(4, 1, frozenset({(1, 2), (1, 3), (2, 4), (3, 4)}))
        seen = set()
        for seed in range(20):
            res = symmetrize(g, RngStream(seed))
            assert res.surplus_pairs == ((4, 3),)
            assert res.sbar is not None
            assert height_profile(res.sbar).z == height_profile(res.sbf).z
            seen.add(tuple(res.sbar.parent))
        assert seen == {(0, 0, 1, 1, 2), (0, 0, 1, 1, 3)}  # both swap outcomes occur

    def test_degenerate_two_close_pairs(self):
        # two surplus edges whose deeper endpoints share a level
        edges = {(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)}
        g = RootedGraph(4, 1, frozenset(edges))
        res = symmetrize(g, RngStream(5))
        assert res.sbar is None

    def test_sbf_distance_preserving(self):
        rng = RngStream(17)
        for r in range(100):
            g, _ = sample_surplus_graph(7, 2, rng.substream(r))
            res = symmetrize(g, rng.substream(1000 + r))
            heights = res.sbf.heights()
            dist = _graph_distances(g)
            assert all(heights[v] == dist[v] for v in range(1, g.n + 1))


def _graph_distances(g: RootedGraph):
    adj = g.adjacency()
    dist = {g.root: 0}
    frontier = [g.root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


class TestProfileWeights:
    def test_w1_examples(self):
        from surplus_lab.lattice_paths import HeightProfile

        assert w1_weight(HeightProfile((1, 2))) == 1   # center-rooted path on 3 labels
        assert w1_weight(HeightProfile((1, 1, 1))) == 0  # end-rooted path
        assert w1_weight(HeightProfile((1, 3))) == 3   # three same-level pairs
        assert w1_weight(HeightProfile((1, 2, 1))) == Fraction(3, 2)

    def test_ws_reduces_to_w1(self):
        from surplus_lab.lattice_paths import HeightProfile

        for z in [(1, 2, 3, 1), (1, 1, 4), (1, 5, 2, 2)]:
            prof = HeightProfile(z)
            assert ws_weight(prof, 1) == w1_weight(prof)

    def test_ws_replacement_bound(self):
        # 0 <= W1^s - s! Ws <= c W1^{s-1} max(z)^2 with c = 3 s^2 2^s
        from surplus_lab.lattice_paths import HeightProfile

        rng = RngStream(23)
        for r in range(200):
            t = sample_labeled_tree(9, rng.substream(r))
            prof = height_profile(t)
            for s in (2, 3):
                w1 = w1_weight(prof)
                ws = ws_weight(prof, s)
                from math import factorial

                diff = w1 ** s - factorial(s) * ws
                assert diff >= 0
                cap = 3 * s * s * 2 ** s * (w1 ** max(s - 1, 0)) * max(prof.z) ** 2
                assert diff <= cap

    def test_gamma_bound(self):
        rng = RngStream(29)
        for r in range(25):
            t = sample_labeled_tree(6, rng.substream(r))
            prof = height_profile(t)
            s = 2
            assert count_degenerate_tuples(t, s) <= degenerate_tuple_bound(prof, 6, s)

    def test_degenerate_rate_shrinks(self):
        # empty-symmetrization frequency looks like c/sqrt(n)
        rates = {}
        for n in (30, 120):
            rng = RngStream(37 + n)
            reps = 400
            empties = 0
            for r in range(reps):
                g, _ = sample_surplus_graph(n, 2, rng.substream(r))
                if symmetrize(g, rng.substream(10_000 + r)).sbar is None:
                    empties += 1
            rates[n] = empties / reps
        assert rates[30] * sqrt(30) < 6.0
        assert rates[120] * sqrt(120) < 6.0
        assert rates[120] < rates[30] + 0.05


class TestDecorationCounts:
    def test_closed_form_vs_enumeration(self):
        from surplus_lab.maps import enumerate_admissible

        for n in range(1, 6):
            for f in enumerate_excursions(n):
                t = tree_of_contour(f)
                for mode in ("bf", "df"):
                    for s in (0, 1, 2):
                        assert decoration_count(f, s, mode) == \
                            len(enumerate_admissible(t, s, mode))


class TestTiltedExpectationOracle:
    def test_matches_exact_tilted_expectation(self):
        # enumerate the exact breadth-first tilted mean of the maximum height
        # at n = 4 and check the self-normalized estimate within 3 SE
        exact_num = exact_den = 0
        for f in enumerate_excursions(4):
            w = bf_weights(f).total
            exact_num += w * f.max_height()
            exact_den += w
        exact = exact_num / exact_den
        ens = tilted_ensemble(4, 1, "bf", 20_000, RngStream(61),
                              {"max": lambda smp: float(smp.exc.max_height())})
        est, se = ens.estimate("max")
        assert abs(est - exact) < 3 * se

    def test_df_tilted_expectation(self):
        from surplus_lab.local_time import inverse_height_functional

        exact_num = exact_den = 0
        for f in enumerate_excursions(5):
            w = df_weights(f).total ** 2
            exact_num += w * inverse_height_functional(f).raw
            exact_den += w
        exact = exact_num / exact_den
        ens = tilted_ensemble(5, 2, "df", 20_000, RngStream(62),
                              {"inv": lambda smp: inverse_height_functional(smp.exc).raw})
        est, se = ens.estimate("inv")
        assert abs(est - exact) < 3 * se


class TestSurplusGraphUniformityN5:
    def test_weighted_uniformity_n5_s1(self):
        # 1110 rooted unit-surplus graphs; per-cell binomial bound with a
        # multiple-testing allowance on top (fixed seed, deterministic)
        reps = 40_000
        rng = RngStream(71)
        acc = Counter()
        for r in range(reps):
            g, w = sample_surplus_graph(5, 1, rng.substream(r))
            acc[g.key()] += w
        universe = {g.key() for g in enumerate_surplus_graphs(5, 1)}
        assert set(acc) <= universe
        assert len(acc) > 0.98 * len(universe)
        total = sum(acc.values())
        p = 1.0 / len(universe)
        worst = max(abs(wsum / total - p) for wsum in acc.values())
        assert worst < 6.0 * sqrt(p * (1 - p) / reps)


class TestEnsembleInvariants:
    def test_weight_validation(self):
        import numpy as np

        with pytest.raises(ValueError):
            WeightedEnsemble(n=1, mode="bf", tilt=0, proposal="x", seed=0, stream=(),
                             weights=np.array([0.0, 0.0]))
        with pytest.raises(ValueError):
            WeightedEnsemble(n=1, mode="bf", tilt=0, proposal="x", seed=0, stream=(),
                             weights=np.array([1.0, np.inf]))

    def test_ess_range(self):
        ens = tilted_ensemble(10, 1, "bf", 64, RngStream(2), {})
        assert 1.0 <= ens.ess() <= 64.0
