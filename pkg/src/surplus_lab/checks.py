"""Exact identity suites: bijections, counts, gluing dichotomies, fiber counts.

Each suite returns a :class:`SuiteResult` holding one named, boolean-valued
check per line, so the CLI and the acceptance tests share a single
implementation of every exact identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .lattice_paths import (
    LabeledTree,
    catalan,
    enumerate_bridges,
    enumerate_excursions,
    excursion_count,
    height_profile,
    tree_of_contour,
    vervaat,
)
from .maps import (
    PermutationPairing,
    bf_explore,
    df_explore,
    enumerate_admissible,
    entangled_pairings,
    insert_edges,
    is_entangled,
    metric_from_root,
    unicellular_glue,
)
from .samplers import (
    RngStream,
    enumerate_maps,
    enumerate_surplus_graphs,
    prufer_decode,
    sample_uniform_excursion,
    sample_corners_bf,
    w1_weight,
    _orient,
)


@dataclass
class SuiteResult:
    name: str
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append((label, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def lines(self) -> list[str]:
        out = []
        for label, ok, detail in self.checks:
            status = "PASS" if ok else "FAIL"
            out.append(f"{status} {self.name}:{label}" + (f" [{detail}]" if detail else ""))
        return out


def bijection_suite(n_max: int = 5, s_max: int = 2) -> SuiteResult:
    """Exploration/insertion round trips and the three-way count equality."""
    res = SuiteResult("bijection")
    for n in range(1, n_max + 1):
        trees = [tree_of_contour(f) for f in enumerate_excursions(n)]
        for s in range(1, s_max + 1):
            built = {}
            ok_round = True
            for tree in trees:
                for xi in enumerate_admissible(tree, s, "bf"):
                    m = insert_edges(tree, xi)
                    key = m.canonical_key()
                    if key in built:
                        ok_round = False
                    built[key] = m
                    t2, xi2 = bf_explore(m)
                    if t2 != tree or xi2 != xi:
                        ok_round = False
                    if insert_edges(t2, xi2).canonical_key() != key:
                        ok_round = False
            res.add(f"bf-roundtrip-n{n}-s{s}", ok_round, f"{len(built)} maps")
            built_df = {}
            ok_round = True
            for tree in trees:
                for xi in enumerate_admissible(tree, s, "df"):
                    m = insert_edges(tree, xi)
                    key = m.canonical_key()
                    if key in built_df:
                        ok_round = False
                    built_df[key] = m
                    t2, xi2 = df_explore(m)
                    if t2 != tree or xi2 != xi:
                        ok_round = False
                    if insert_edges(t2, xi2).canonical_key() != key:
                        ok_round = False
            res.add(f"df-roundtrip-n{n}-s{s}", ok_round, f"{len(built_df)} maps")
            res.add(f"same-map-set-n{n}-s{s}", set(built) == set(built_df),
                    f"bf={len(built)} df={len(built_df)}")
    return res


def count_suite(n_max: int = 10) -> SuiteResult:
    """Excursion counts against the closed form, plus the first map counts."""
    res = SuiteResult("counts")
    for n in range(1, n_max + 1):
        expected = excursion_count(n)
        got = len(enumerate_excursions(n))
        res.add(f"excursions-n{n}", got == expected, f"{got} vs {expected}")
        res.add(f"catalan-n{n}", expected == catalan(n - 1))
    res.add("maps-n1-s1", len(enumerate_maps(1, 1)) == 1)
    res.add("maps-n2-s1", len(enumerate_maps(2, 1)) == 5)
    return res


def _all_rooted_labeled_trees(n: int):
    """Every rooted labeled tree on [n] via code enumeration."""
    if n == 1:
        yield LabeledTree(1, 1, [0, 0])
        return
    for root in range(1, n + 1):
        if n == 2:
            yield _orient(2, [(1, 2)], root)
            continue
        for seq in product(range(1, n + 1), repeat=n - 2):
            yield _orient(n, prufer_decode(list(seq), n), root)


def w1_suite(n_min: int = 2, n_max: int = 6) -> SuiteResult:
    """Symmetrized-tree weights summed over all rooted labeled trees equal
    the rooted unit-surplus graph count."""
    res = SuiteResult("w1")
    for n in range(n_min, n_max + 1):
        total = Fraction(0)
        trees = 0
        for tree in _all_rooted_labeled_trees(n):
            trees += 1
            total += w1_weight(height_profile(tree))
        res.add(f"tree-count-n{n}", trees == n ** (n - 1), f"{trees}")
        rhs = len(enumerate_surplus_graphs(n, 1))
        res.add(f"w1-sum-n{n}", total == rhs, f"{total} vs {rhs}")
        if n == 3:
            res.add("w1-n3-value", total == 3, f"{total}")
    return res


def psi_suite(n_max: int = 5) -> SuiteResult:
    """Corner-tuple totals match the brute count of distinct-corner unicellular maps."""
    from .estimators import um_count_identity

    res = SuiteResult("psi")
    for n in range(2, n_max + 1):
        lhs, rhs = um_count_identity(n, 1)
        res.add(f"identity-n{n}", lhs == rhs, f"{lhs} vs {rhs}")
        if n == 2:
            res.add("n2-zero", lhs == 0)
        if n == 3:
            res.add("n3-value", lhs == 3, f"{lhs}")
    return res


def vervaat_suite(n_max: int = 6) -> SuiteResult:
    """Uniform bridges push forward uniformly onto excursion shapes with
    fibers of size 2n+1."""
    res = SuiteResult("vervaat")
    for n in range(1, n_max + 1):
        fibers: dict[tuple, int] = {}
        total = 0
        for b in enumerate_bridges(n):
            total += 1
            v = vervaat(b)
            if not v.is_excursion_shape():
                res.add(f"shape-n{n}", False, f"non-shape image {v.as_tuple()}")
                break
            fibers[v.as_tuple()] = fibers.get(v.as_tuple(), 0) + 1
        else:
            res.add(f"fiber-size-n{n}", set(fibers.values()) == {2 * n + 1},
                    f"{len(fibers)} shapes x {2 * n + 1}")
            res.add(f"shape-count-n{n}", len(fibers) == catalan(n), f"{len(fibers)}")
            res.add(f"bridge-count-n{n}", total == (2 * n + 1) * catalan(n))
    return res


def sg_suite(check_size_2: bool = True) -> SuiteResult:
    """Pinned small entangled-pairing facts and order-convention agreement."""
    res = SuiteResult("sg")
    s1 = entangled_pairings(1)
    res.add("g1-unique", [str(p) for p in s1] == ["(1,3)(2,4)"], ",".join(map(str, s1)))
    res.add("g1-excludes-nested", not is_entangled(PermutationPairing(((1, 2), (3, 4)))))
    res.add("g1-excludes-disjoint", not is_entangled(PermutationPairing(((1, 4), (2, 3)))))
    ex1 = PermutationPairing.parse("(1,7)(2,5)(3,8)(4,6)")
    ex2 = PermutationPairing.parse("(1,3)(2,4)(5,7)(6,8)")
    res.add("g2-example-1", is_entangled(ex1))
    res.add("g2-example-2", is_entangled(ex2))
    if check_size_2:
        from .maps import _all_pairings

        first = {p for p in _all_pairings(8)
                 if is_entangled(PermutationPairing(p), "pairing-first")}
        second = {p for p in _all_pairings(8)
                  if is_entangled(PermutationPairing(p), "cycle-first")}
        res.add("g2-order-agreement", first == second, f"|S_(2)|={len(first)}")
        res.add("g2-examples-in-set",
                ex1.transpositions in first and ex2.transpositions in first)
    return res


def gluing_dichotomy_suite(n_max: int = 5) -> SuiteResult:
    """Gluing dichotomy: one face exactly when the pairing is entangled."""
    from .maps import _all_pairings

    res = SuiteResult("dichotomy")
    g = 1
    pairings = [PermutationPairing(p) for p in _all_pairings(4 * g)]
    entangled = {p.transpositions for p in entangled_pairings(g)}
    for n in range(3, n_max + 1):
        ok = True
        tested = 0
        for f in enumerate_excursions(n):
            tree = tree_of_contour(f)
            for corners in combinations(range(1, 2 * n), 4 * g):
                for pairing in pairings:
                    m, unicellular = unicellular_glue(tree, pairing, corners)
                    tested += 1
                    if unicellular != (pairing.transpositions in entangled):
                        ok = False
                    if m.genus() not in (0, 1):
                        ok = False
                    if unicellular and m.genus() != 1:
                        ok = False
        res.add(f"dichotomy-n{n}", ok, f"{tested} gluings")
    return res


def radius_invariance_suite(n_enum: int = 4, n_sample: int = 1000, reps: int = 10_000,
                            seed: int = 20_240_501) -> SuiteResult:
    """Map radius equals exploration-tree height; ball volumes match level counts."""
    res = SuiteResult("radius")
    for n in range(1, n_enum + 1):
        for s in range(0, 3):
            ok = True
            for m in enumerate_maps(n, s):
                tree, _ = bf_explore(m)
                metric = metric_from_root(m)
                if metric.radius != tree.height():
                    ok = False
                if list(metric.level_counts) != list(height_profile(tree).z):
                    ok = False
            res.add(f"enumerated-n{n}-s{s}", ok)
    # sampled maps: decorate uniform trees with one surplus edge
    rng = RngStream(seed)
    ok = True
    for r in range(reps):
        gen = rng.substream(r).generator()
        exc = sample_uniform_excursion(n_sample, gen)
        tree = tree_of_contour(exc)
        xi = sample_corners_bf(exc, 1, gen)
        vat = tree.vertex_at_time
        chords = [(vat[xi.indices[0]], vat[xi.indices[1]])]
        dist = _tree_chord_bfs(tree, chords)
        if max(dist) != exc.max_height():
            ok = False
            break
        levels = np.bincount(np.asarray(dist))
        depths = np.bincount(np.asarray(tree.depth))
        if len(levels) != len(depths) or not (levels == depths).all():
            ok = False
            break
    res.add(f"sampled-n{n_sample}-x{reps}", ok)
    return res


def _tree_chord_bfs(tree, chords) -> list[int]:
    chord_adj: dict[int, list[int]] = {}
    for u, v in chords:
        chord_adj.setdefault(u, []).append(v)
        chord_adj.setdefault(v, []).append(u)
    dist = [-1] * (tree.n + 1)
    dist[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            du = dist[u] + 1
            p = tree.parent[u]
            if p >= 0 and dist[p] < 0:
                dist[p] = du
                nxt.append(p)
            for v in tree.children[u]:
                if dist[v] < 0:
                    dist[v] = du
                    nxt.append(v)
            for v in chord_adj.get(u, ()):
                if dist[v] < 0:
                    dist[v] = du
                    nxt.append(v)
        frontier = nxt
    return dist


def decoration_count_suite(n_max: int = 5) -> SuiteResult:
    """Closed-form decoration counts against exhaustive enumeration."""
    from .samplers import decoration_count

    res = SuiteResult("decoration-count")
    for mode in ("bf", "df"):
        ok1 = True
        ok2 = True
        for n in range(1, n_max + 1):
            for f in enumerate_excursions(n):
                tree = tree_of_contour(f)
                if decoration_count(f, 1, mode) != len(enumerate_admissible(tree, 1, mode)):
                    ok1 = False
                if decoration_count(f, 2, mode) != len(enumerate_admissible(tree, 2, mode)):
                    ok2 = False
        res.add(f"{mode}-s1-n<={n_max}", ok1)
        res.add(f"{mode}-s2-n<={n_max}", ok2)
    return res
