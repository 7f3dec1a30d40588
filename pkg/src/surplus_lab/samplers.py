"""Exact samplers, exhaustive enumerators, and tilted weighted ensembles.

Sampling is driven by :class:`RngStream`: a master seed plus a tuple of
stream indices, expanded through ``numpy``'s ``SeedSequence`` spawning so
that (seed, stream) fully determines every draw and distinct streams are
statistically independent.  Ensemble replicate ``r`` always uses substream
``r``, so results do not depend on evaluation order.

Tilted laws are realized by self-normalized importance sampling from the
uniform proposal: excursions are drawn uniformly and carry weights
``B(f)^s`` (breadth-first), ``D(f)^s`` (depth-first), or the number of
gluable corner tuples (unicellular), so that weighted averages estimate
expectations under the corresponding tilted law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable

import numpy as np

from .lattice_paths import (
    EnumerationCapExceeded,
    HeightProfile,
    LabeledTree,
    LatticeBridge,
    LatticeExcursion,
    PlaneTree,
    tree_of_contour,
)
from .local_time import bf_per_index, df_per_index, df_level_sets
from .maps import (
    AdmissibleCorners,
    RootedMap,
    enumerate_admissible,
    entangled_pairings,
    insert_edges,
    pairing_tuple_count,
    _prefix_suffix_tables,
)


class DegenerateEnsembleError(ValueError):
    """All importance weights vanished; the tilted law is unreachable at this size."""


# -- reproducible stream derivation -------------------------------------------


@dataclass(frozen=True)
class RngStream:
    """Master seed plus a stream path; (seed, path) determines all draws."""

    seed: int
    path: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, *indices: int) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(indices))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot interpret {rng!r} as a random generator")


# -- uniform samplers -----------------------------------------------------------


def sample_uniform_bridge(n: int, rng) -> LatticeBridge:
    """Uniform +-1 bridge from 0 to -1 with ``2n + 1`` steps."""
    gen = as_generator(rng)
    steps = np.concatenate([np.ones(n, dtype=np.int64), -np.ones(n + 1, dtype=np.int64)])
    steps = gen.permutation(steps)
    return LatticeBridge(np.concatenate([[0], np.cumsum(steps)]), validate=False)


def sample_uniform_excursion(n: int, rng) -> LatticeExcursion:
    """Uniform contour excursion of half-length ``n``.

    Draws a uniform bridge with ``2n - 1`` steps, rotates it at its first
    global minimum (the cycle lemma makes the result uniform over excursion
    shapes), and attaches the root step.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return LatticeExcursion([0, 1, 0], validate=False)
    gen = as_generator(rng)
    steps = np.concatenate([np.ones(n - 1, dtype=np.int64), -np.ones(n, dtype=np.int64)])
    steps = gen.permutation(steps)
    walk = np.concatenate([[0], np.cumsum(steps)])
    tau = int(np.argmin(walk))
    if tau != len(walk) - 1:
        steps = np.concatenate([steps[tau:], steps[:tau]])
    shape = np.concatenate([[0], np.cumsum(steps)])
    values = np.empty(2 * n + 1, dtype=np.int64)
    values[0] = 0
    values[1:] = shape + 1
    return LatticeExcursion(values, validate=False)


def prufer_decode(seq, n: int) -> list[tuple[int, int]]:
    """Edges of the labeled tree on [n] with the given code of length n-2."""
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    ptr = 1
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((leaf, int(x)))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = int(x)
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n))
    return edges


def _orient(n: int, edges, root: int) -> LabeledTree:
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = [0] * (n + 1)
    seen = [False] * (n + 1)
    seen[root] = True
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                stack.append(v)
    return LabeledTree(n, root, parent)


def sample_labeled_tree(n: int, rng) -> LabeledTree:
    """Uniform over the ``n^(n-1)`` rooted labeled trees on [n]."""
    gen = as_generator(rng)
    if n == 1:
        return LabeledTree(1, 1, [0, 0])
    root = int(gen.integers(1, n + 1))
    if n == 2:
        return _orient(2, [(1, 2)], root)
    seq = gen.integers(1, n + 1, size=n - 2)
    return _orient(n, prufer_decode(seq, n), root)


# -- corner samplers --------------------------------------------------------------


def _corner_level_lists(values) -> list[list[int]]:
    """Interior corner times grouped by height (index = level, ascending times)."""
    two_n = len(values) - 1
    levels: list[list[int]] = [[] for _ in range(max(values) + 2)]
    for i in range(1, two_n):
        levels[values[i]].append(i)
    return levels


def _weighted_index(per_index: np.ndarray, gen: np.random.Generator) -> int:
    cum = np.cumsum(per_index, dtype=np.float64)
    u = gen.random() * cum[-1]
    return int(np.searchsorted(cum, u, side="right"))


def _pairs_to_decoration(mode: str, pairs: list[tuple[int, int]]) -> AdmissibleCorners:
    """Canonical tags for sampled corner pairs: blocks ordered by sorted pair position."""
    order = sorted(range(len(pairs)), key=lambda j: pairs[j])
    next_tag: dict[int, int] = {}
    tagged = []
    for j in order:
        i1, i2 = pairs[j]
        k1 = next_tag.get(i1, 0) + 1
        next_tag[i1] = k1
        k2 = next_tag.get(i2, 0) + 1
        next_tag[i2] = k2
        tagged.append((i1, k1, i2, k2))
    tagged.sort(key=lambda p: (p[0], p[2], p[1]))
    indices = tuple(x for p in tagged for x in (p[0], p[2]))
    tags = tuple(x for p in tagged for x in (p[1], p[3]))
    return AdmissibleCorners(mode, indices, tags)


def sample_corners_bf(f: LatticeExcursion, s: int, rng, per_index=None) -> AdmissibleCorners:
    """Independent corner pairs: first index by weight, partner uniform at the
    same height or one below."""
    gen = as_generator(rng)
    vals = f.values.tolist()
    if per_index is None:
        per_index = np.array(bf_per_index(vals), dtype=np.int64)
    if int(per_index.sum()) == 0:
        raise DegenerateEnsembleError("breadth-first corner weight vanished")
    levels = _corner_level_lists(vals)
    two_n = len(vals) - 1
    pairs = []
    from bisect import bisect_left

    for _ in range(s):
        i1 = _weighted_index(per_index, gen)
        h = vals[i1]
        same = levels[h]
        below = levels[h - 1] if h >= 1 else []
        a = len(same) - bisect_left(same, i1)
        b = len(below) - bisect_left(below, i1)
        r = int(gen.integers(a + b))
        if r < a:
            i2 = same[len(same) - a + r]
        else:
            i2 = below[len(below) - b + (r - a)]
        pairs.append((i1, i2))
    return _pairs_to_decoration("bf", pairs)


def sample_corners_df(f: LatticeExcursion, s: int, rng, per_index=None) -> AdmissibleCorners:
    """Independent corner pairs: first index by weight, then an ancestor level
    by its revisit count, then a uniform revisit time."""
    gen = as_generator(rng)
    vals = f.values.tolist()
    if per_index is None:
        per_index = np.array(df_per_index(vals), dtype=np.int64)
    if int(per_index.sum()) == 0:
        raise DegenerateEnsembleError("depth-first corner weight vanished")
    pairs = []
    for _ in range(s):
        i1 = _weighted_index(per_index, gen)
        buckets = df_level_sets(f, i1)
        sizes = [(y, len(ts)) for y, ts in sorted(buckets.items())]
        total = sum(c for _, c in sizes)
        u = int(gen.integers(total))
        for y, c in sizes:
            if u < c:
                i2 = buckets[y][int(gen.integers(c))]
                break
            u -= c
        pairs.append((i1, i2))
    return _pairs_to_decoration("df", pairs)


def sample_unicellular_decoration(f: LatticeExcursion, g: int, rng):
    """A pairing, its heights, and a gluable increasing corner tuple.

    The pairing is drawn with probability proportional to its tuple count and
    the tuple uniformly among the gluable ones, which makes the heights
    follow their section counts and the corners conditionally uniform.
    """
    gen = as_generator(rng)
    pairings = entangled_pairings(g)
    totals = [pairing_tuple_count(f, p) for p in pairings]
    grand = sum(totals)
    if grand == 0:
        raise DegenerateEnsembleError(f"no gluable corner tuples at n={f.n}, g={g}")
    u = int(gen.integers(grand))
    choice = 0
    while u >= totals[choice]:
        u -= totals[choice]
        choice += 1
    pairing = pairings[choice]
    if g == 1:
        corners = _sample_tuple_genus_one(f, gen)
    else:
        target = int(gen.integers(totals[choice]))
        from .maps import enumerate_pairing_tuples

        for k, tup in enumerate(enumerate_pairing_tuples(f, pairing)):
            if k == target:
                corners = tup
                break
    vals = f.values
    heights = tuple(int(vals[corners[a - 1]]) for a, b in pairing.transpositions)
    return pairing, heights, corners


def _sample_tuple_genus_one(f: LatticeExcursion, gen: np.random.Generator):
    """Uniform gluable quadruple for the genus-one pairing (1,3)(2,4)."""
    vals = f.values
    two_n = 2 * f.n
    pc, sc = _prefix_suffix_tables(f)
    h = vals
    per_r3 = np.zeros(two_n, dtype=np.float64)
    for r3 in range(3, two_n - 1):
        a = pc[h[r3], 0:r3 - 1] + pc[h[r3] + 1, 0:r3 - 1]
        b = sc[h[1:r3], r3 + 1] + sc[h[1:r3] - 1, r3 + 1]
        per_r3[r3] = float(np.dot(a, b))
    total = per_r3.sum()
    if total <= 0:
        raise DegenerateEnsembleError("no gluable quadruples")
    r3 = int(np.searchsorted(np.cumsum(per_r3), gen.random() * total, side="right"))
    a = pc[h[r3], 0:r3 - 1] + pc[h[r3] + 1, 0:r3 - 1]
    b = sc[h[1:r3], r3 + 1] + sc[h[1:r3] - 1, r3 + 1]
    w = (a * b).astype(np.float64)
    r2 = 1 + int(np.searchsorted(np.cumsum(w), gen.random() * w.sum(), side="right"))
    levels = _corner_level_lists(vals.tolist())
    from bisect import bisect_left

    def pick_prefix(level_a, level_b, upper):
        ca = levels[level_a][: bisect_left(levels[level_a], upper)] if level_a < len(levels) else []
        cb = levels[level_b][: bisect_left(levels[level_b], upper)] if level_b < len(levels) else []
        k = int(gen.integers(len(ca) + len(cb)))
        return ca[k] if k < len(ca) else cb[k - len(ca)]

    def pick_suffix(level_a, level_b, lower):
        ca = levels[level_a][bisect_left(levels[level_a], lower + 1):] if level_a < len(levels) else []
        cb = levels[level_b][bisect_left(levels[level_b], lower + 1):] if level_b < len(levels) else []
        k = int(gen.integers(len(ca) + len(cb)))
        return ca[k] if k < len(ca) else cb[k - len(ca)]

    r1 = pick_prefix(int(h[r3]), int(h[r3]) + 1, r2)
    r4 = pick_suffix(int(h[r2]), int(h[r2]) - 1, r3)
    return (r1, r2, r3, r4)


# -- exact decoration counts ---------------------------------------------------


def _endpoint_tables(values, mode: str):
    """Per-corner pair-endpoint counts: (as-first, as-second) for every corner."""
    two_n = len(values) - 1
    if mode == "bf":
        first = bf_per_index(values)
        second = [0] * (two_n + 1)
        cnt = [0] * (max(values) + 2)
        for c in range(1, two_n):
            cnt[values[c]] += 1
            second[c] = cnt[values[c]] + cnt[values[c] + 1]
    else:
        first = df_per_index(values)
        second = [0] * (two_n + 1)
        stack = [0]  # positions with strictly increasing... previous smaller value
        for c in range(1, two_n):
            while stack and values[stack[-1]] >= values[c]:
                stack.pop()
            prev_smaller = stack[-1] if stack else 0
            second[c] = c - prev_smaller
            stack.append(c)
    return first, second


def decoration_count(f: LatticeExcursion, s: int, mode: str) -> int:
    """Exact number of canonical decorations with ``s`` surplus edges (s <= 2)."""
    vals = f.values.tolist()
    two_n = len(vals) - 1
    if s == 0:
        return 1
    first, second = _endpoint_tables(vals, mode)
    total_pairs = sum(first[1:two_n])
    if s == 1:
        return total_pairs
    if s == 2:
        n_loops = two_n - 1
        inc = [first[c] + second[c] - 1 for c in range(two_n)]
        mult = [first[c] + second[c] for c in range(two_n)]
        y_share = sum(inc[c] * (mult[c] - 1) for c in range(1, two_n)) - total_pairs + n_loops
        sum_inc = sum(inc[1:two_n])
        gap = y_share + 2 * total_pairs + 2 * sum_inc
        assert (total_pairs ** 2 + gap) % 2 == 0
        return (total_pairs ** 2 + gap) // 2
    raise ValueError("decoration_count supports s <= 2; use enumerate_admissible for more")


def decoration_count_gap(f: LatticeExcursion, s: int, mode: str) -> int:
    """Exact value of ``s! * (decoration count) - (pair count)^s`` for s <= 2."""
    vals = f.values.tolist()
    two_n = len(vals) - 1
    if s == 0:
        return 0
    first, second = _endpoint_tables(vals, mode)
    total_pairs = sum(first[1:two_n])
    if s == 1:
        return 0
    if s == 2:
        n_loops = two_n - 1
        inc = [first[c] + second[c] - 1 for c in range(two_n)]
        mult = [first[c] + second[c] for c in range(two_n)]
        y_share = sum(inc[c] * (mult[c] - 1) for c in range(1, two_n)) - total_pairs + n_loops
        sum_inc = sum(inc[1:two_n])
        return y_share + 2 * total_pairs + 2 * sum_inc
    raise ValueError("gap formula implemented for s <= 2")


# -- weighted ensembles -----------------------------------------------------------


@dataclass
class WeightedEnsemble:
    """Samples of named functionals with importance weights from a tilted run."""

    n: int
    mode: str
    tilt: int
    proposal: str
    seed: int
    stream: tuple
    weights: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if len(w) == 0 or not np.all(np.isfinite(w)) or np.any(w < 0) or not np.any(w > 0):
            raise ValueError("weights must be finite, nonnegative, with a positive entry")
        self.weights = w

    @property
    def reps(self) -> int:
        return len(self.weights)

    def ess(self) -> float:
        w = self.weights
        return float(w.sum() ** 2 / np.sum(w ** 2))

    def estimate(self, name: str):
        """Self-normalized mean and delta-method standard error of a column."""
        w = self.weights
        x = self.columns[name]
        wsum = w.sum()
        est = (w * x.T).T.sum(axis=0) / wsum
        resid = x - est
        se = np.sqrt(np.sum((w * resid.T).T ** 2, axis=0)) / wsum
        if np.ndim(est) == 0:
            return float(est), float(se)
        return est, se

    def csv_header(self) -> list[str]:
        cols = []
        for name, arr in self.columns.items():
            if arr.ndim == 1:
                cols.append(name)
            else:
                cols.extend(f"{name}_{k}" for k in range(arr.shape[1]))
        return ["replicate", "weight"] + cols

    def csv_rows(self):
        for r in range(self.reps):
            row = [r, float(self.weights[r])]
            for arr in self.columns.values():
                if arr.ndim == 1:
                    row.append(float(arr[r]))
                else:
                    row.extend(float(v) for v in arr[r])
            yield row


class TiltSample:
    """Per-replicate lazy bundle shared by ensemble functionals."""

    def __init__(self, exc: LatticeExcursion, gen: np.random.Generator, mode: str, tilt: int,
                 pairings=None):
        self.exc = exc
        self.gen = gen
        self.mode = mode
        self.tilt = tilt
        self._pairings = pairings
        self._vals = None
        self._bf = None
        self._df = None
        self._tree = None
        self._chords = None
        self._dist_root = None
        self._weight = None

    @property
    def vals(self) -> list[int]:
        if self._vals is None:
            self._vals = self.exc.values.tolist()
        return self._vals

    def bf_index_weights(self) -> np.ndarray:
        if self._bf is None:
            self._bf = np.array(bf_per_index(self.vals), dtype=np.int64)
        return self._bf

    def df_index_weights(self) -> np.ndarray:
        if self._df is None:
            self._df = np.array(df_per_index(self.vals), dtype=np.int64)
        return self._df

    def weight(self) -> float:
        if self._weight is None:
            if self.mode == "bf":
                self._weight = float(int(self.bf_index_weights().sum()) ** self.tilt)
            elif self.mode == "df":
                self._weight = float(int(self.df_index_weights().sum()) ** self.tilt)
            elif self.mode == "um":
                self._weight = float(sum(pairing_tuple_count(self.exc, p) for p in self._pairings))
            else:
                raise ValueError(f"unknown tilt mode {self.mode!r}")
        return self._weight

    def tree(self) -> PlaneTree:
        if self._tree is None:
            self._tree = tree_of_contour(self.exc)
        return self._tree

    def chords(self) -> list[tuple[int, int]]:
        """Sampled surplus edges as vertex pairs (corner decoration applied once)."""
        if self._chords is None:
            tree = self.tree()
            vat = tree.vertex_at_time
            if self.weight() == 0.0:
                raise DegenerateEnsembleError("cannot decorate a zero-weight sample")
            if self.mode == "bf":
                xi = sample_corners_bf(self.exc, self.tilt, self.gen, self.bf_index_weights())
                pair_idx = [(xi.indices[2 * j], xi.indices[2 * j + 1]) for j in range(xi.s)]
            elif self.mode == "df":
                xi = sample_corners_df(self.exc, self.tilt, self.gen, self.df_index_weights())
                pair_idx = [(xi.indices[2 * j], xi.indices[2 * j + 1]) for j in range(xi.s)]
            else:
                pairing, _, corners = sample_unicellular_decoration(self.exc, self.tilt, self.gen)
                pair_idx = [(corners[a - 1], corners[b - 1]) for a, b in pairing.transpositions]
            self._chords = [(vat[i1], vat[i2]) for i1, i2 in pair_idx]
        return self._chords

    def distances_from_root(self) -> list[int]:
        if self._dist_root is None:
            self._dist_root = self._bfs(0)
        return self._dist_root

    def _bfs(self, start: int) -> list[int]:
        tree = self.tree()
        chord_adj: dict[int, list[int]] = {}
        for u, v in self.chords():
            chord_adj.setdefault(u, []).append(v)
            chord_adj.setdefault(v, []).append(u)
        parent = tree.parent
        children = tree.children
        dist = [-1] * (tree.n + 1)
        dist[start] = 0
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                du = dist[u] + 1
                p = parent[u]
                if p >= 0 and dist[p] < 0:
                    dist[p] = du
                    nxt.append(p)
                for v in children[u]:
                    if dist[v] < 0:
                        dist[v] = du
                        nxt.append(v)
                if u in chord_adj:
                    for v in chord_adj[u]:
                        if dist[v] < 0:
                            dist[v] = du
                            nxt.append(v)
            frontier = nxt
        return dist

    def graph_distance(self, a: int, b: int) -> int:
        return self._bfs(a)[b]


def tilted_ensemble(n: int, tilt: int, mode: str, reps: int, rng: RngStream,
                    functionals: dict[str, Callable[[TiltSample], object]],
                    proposal: str = "uniform-excursion") -> WeightedEnsemble:
    """Self-normalized importance-sampling run against the uniform excursion law.

    ``functionals`` maps column names to callables evaluated on the lazy
    per-replicate sample; evaluation order follows dict order, which pins the
    consumption of the replicate's random stream.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if mode not in ("bf", "df", "um"):
        raise ValueError(f"unknown tilt mode {mode!r}")
    pairings = entangled_pairings(tilt) if mode == "um" else None
    weights = np.empty(reps, dtype=np.float64)
    raw_cols: dict[str, list] = {name: [] for name in functionals}
    for r in range(reps):
        gen = rng.substream(r).generator()
        exc = sample_uniform_excursion(n, gen)
        sample = TiltSample(exc, gen, mode, tilt, pairings)
        weights[r] = sample.weight()
        for name, fn in functionals.items():
            # zero-weight samples cannot always be decorated; their values never matter
            raw_cols[name].append(fn(sample) if weights[r] > 0 else None)
    if not np.any(weights > 0):
        raise DegenerateEnsembleError(f"all {reps} weights vanished (mode={mode}, n={n})")
    columns = {}
    for name, vals in raw_cols.items():
        template = next(v for v in vals if v is not None)
        zero = np.zeros_like(np.asarray(template, dtype=np.float64))
        filled = [zero if v is None else v for v in vals]
        columns[name] = np.asarray(filled, dtype=np.float64)
    return WeightedEnsemble(n=n, mode=mode, tilt=tilt, proposal=proposal,
                            seed=rng.seed, stream=rng.path, weights=weights, columns=columns)


# -- maps: enumeration and uniform sampling ---------------------------------------


def enumerate_maps(n: int, s: int, mode: str = "bf", cap: int = 5) -> list[RootedMap]:
    """All rooted maps with n+1 vertices, surplus s, and a degree-one root."""
    from .lattice_paths import enumerate_excursions

    if n > cap or s > 2:
        raise EnumerationCapExceeded(f"map enumeration capped at n<=5, s<=2 (got n={n}, s={s})")
    out = []
    seen = set()
    for f in enumerate_excursions(n):
        tree = tree_of_contour(f)
        for xi in enumerate_admissible(tree, s, mode):
            m = insert_edges(tree, xi)
            key = m.canonical_key()
            if key in seen:
                raise RuntimeError("decoration enumeration produced duplicate maps")
            seen.add(key)
            out.append(m)
    return out


def sample_map_decoration(n: int, s: int, rng) -> tuple[LatticeExcursion, AdmissibleCorners, float]:
    """One weighted draw of (excursion, decoration) targeting the uniform map law.

    The excursion carries weight equal to its exact decoration count and the
    decoration is uniform among the tree's decorations, so the weighted law
    over glued maps is uniform.  Exact for ``s <= 1`` at any size and for
    ``s = 2`` up to moderate sizes (decorations are enumerated on demand);
    beyond that the independent-pair surrogate law is used for the
    decoration, whose total-variation gap vanishes with n.
    """
    gen = as_generator(rng)
    exc = sample_uniform_excursion(n, gen)
    if s == 0:
        return exc, AdmissibleCorners("bf", (), ()), 1.0
    if s == 1:
        xi = sample_corners_bf(exc, 1, gen)
        return exc, xi, float(decoration_count(exc, 1, "bf"))
    if s == 2 and n <= 40:
        tree = tree_of_contour(exc)
        decorations = enumerate_admissible(tree, 2, "bf", cap=max(8, n))
        xi = decorations[int(gen.integers(len(decorations)))]
        return exc, xi, float(len(decorations))
    xi = sample_corners_bf(exc, s, gen)
    weight = float(decoration_count(exc, s, "bf")) if s == 2 else \
        float(int(np.sum(bf_per_index(exc.values.tolist()))) ** s)
    return exc, xi, weight


def sample_uniform_map(n: int, s: int, rng) -> tuple[RootedMap, float]:
    """One weighted map draw; see :func:`sample_map_decoration` for the law."""
    exc, xi, weight = sample_map_decoration(n, s, rng)
    return insert_edges(tree_of_contour(exc), xi, validate=False), weight


# -- labeled graphs with surplus -----------------------------------------------------


@dataclass(frozen=True)
class RootedGraph:
    """Rooted simple connected labeled graph on vertex set 1..n."""

    n: int
    root: int
    edges: frozenset

    @property
    def surplus(self) -> int:
        return len(self.edges) - self.n + 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    def key(self):
        return (self.root, tuple(sorted(self.edges)))


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _is_connected(n: int, edges) -> bool:
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {1}
    stack = [1]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def enumerate_surplus_graphs(n: int, s: int, cap: int = 6) -> list[RootedGraph]:
    """All rooted connected simple graphs on [n] with surplus s."""
    if n > cap or s > 2:
        raise EnumerationCapExceeded(f"graph enumeration capped at n<=6, s<=2 (got n={n}, s={s})")
    all_pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    out = []
    for subset in combinations(all_pairs, n - 1 + s):
        if _is_connected(n, subset):
            for root in range(1, n + 1):
                out.append(RootedGraph(n, root, frozenset(subset)))
    return out


def spanning_tree_count(n: int, edges) -> int:
    """Matrix-tree count via an exact integer (Bareiss) determinant."""
    if n == 1:
        return 1
    lap = [[0] * n for _ in range(n)]
    for u, v in edges:
        lap[u - 1][u - 1] += 1
        lap[v - 1][v - 1] += 1
        lap[u - 1][v - 1] -= 1
        lap[v - 1][u - 1] -= 1
    m = [row[1:] for row in lap[1:]]
    size = n - 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for swap in range(k + 1, size):
                if m[swap][k] != 0:
                    m[k], m[swap] = m[swap], m[k]
                    for row in m:
                        row[k], row[swap] = row[swap], row[k]
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return m[size - 1][size - 1]


def sample_surplus_graph(n: int, s: int, rng) -> tuple[RootedGraph, float]:
    """Weighted draw targeting the uniform rooted surplus-s graph law.

    Proposal: uniform rooted labeled tree plus ``s`` uniform distinct
    non-tree edges; weight ``1 / (number of spanning trees)`` corrects the
    multiplicity with which each graph arises.
    """
    gen = as_generator(rng)
    tree = sample_labeled_tree(n, gen)
    tree_edges = {_edge(v, tree.parent[v]) for v in range(1, n + 1) if v != tree.root}
    pool = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)
            if (u, v) not in tree_edges]
    if len(pool) < s:
        raise DegenerateEnsembleError(f"no simple graph on {n} vertices with surplus {s}")
    extra = [pool[int(k)] for k in gen.choice(len(pool), size=s, replace=False)] if s else []
    edges = frozenset(tree_edges | set(extra))
    graph = RootedGraph(n, tree.root, edges)
    return graph, 1.0 / spanning_tree_count(n, edges)


# -- breadth-first symmetrization of labeled graphs -----------------------------------


@dataclass(frozen=True)
class SymmetrizeResult:
    sbf: LabeledTree
    sbar: LabeledTree | None  # None encodes the degenerate (empty) outcome
    surplus_pairs: tuple[tuple[int, int], ...]
    swapped: tuple[bool, ...]


def bfs_spanning_tree(graph: RootedGraph) -> LabeledTree:
    """Breadth-first spanning tree exploring neighbors in increasing label order."""
    adj = graph.adjacency()
    parent = [0] * (graph.n + 1)
    seen = [False] * (graph.n + 1)
    seen[graph.root] = True
    queue = [graph.root]
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                queue.append(v)
    if not all(seen[1:]):
        raise ValueError("graph is not connected")
    return LabeledTree(graph.n, graph.root, parent)


def symmetrize(graph: RootedGraph, rng=None) -> SymmetrizeResult:
    """Label-order BFS tree plus the randomized height-balancing swap.

    Each surplus edge joins vertices whose heights differ by at most one; an
    equal-height edge is kept as is, a one-step edge re-parents its deeper
    endpoint with probability 1/2.  When two surplus edges have deeper
    endpoints within one level of each other the symmetrized tree is the
    degenerate (empty) outcome, encoded as ``sbar=None``.
    """
    sbf = bfs_spanning_tree(graph)
    heights = sbf.heights()
    tree_edges = {_edge(v, sbf.parent[v]) for v in range(1, graph.n + 1) if v != graph.root}
    pairs = []
    for u, v in sorted(graph.edges - frozenset(tree_edges)):
        hu, hv = heights[u], heights[v]
        if abs(hu - hv) > 1:
            raise AssertionError("breadth-first tree left a surplus edge spanning 2+ levels")
        if hu == hv:
            pairs.append((min(u, v), max(u, v)))
        elif hu == hv + 1:
            pairs.append((u, v))
        else:
            pairs.append((v, u))
    pairs.sort()
    if graph.surplus != len(pairs):
        raise AssertionError("surplus edge count mismatch")
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            if abs(heights[pairs[a][0]] - heights[pairs[b][0]]) <= 1:
                return SymmetrizeResult(sbf, None, tuple(pairs), ())
    gen = as_generator(rng) if rng is not None else None
    parent = list(sbf.parent)
    swapped = []
    for i, j in pairs:
        if heights[i] == heights[j]:
            swapped.append(False)
            continue
        if gen is None:
            raise ValueError("swaps require a random stream")
        do_swap = bool(gen.integers(2))
        if do_swap:
            parent[i] = j
        swapped.append(do_swap)
    sbar = LabeledTree(graph.n, graph.root, parent)
    return SymmetrizeResult(sbf, sbar, tuple(pairs), tuple(swapped))


# -- height-profile weights -------------------------------------------------------


def w1_weight(profile: HeightProfile) -> Fraction:
    """Weight of a rooted labeled tree among surplus-one symmetrized trees.

    Counts same-height vertex pairs plus half the count of one-step pairs
    excluding parents: summing it over all rooted labeled trees on [n] gives
    the number of rooted connected unit-surplus graphs on [n].
    """
    z = profile.z
    total = Fraction(0)
    for level in range(1, len(z)):
        total += comb(z[level], 2) + Fraction(z[level] * (z[level - 1] - 1), 2)
    return total


def ws_weight(profile: HeightProfile, s: int) -> Fraction:
    """Multi-surplus analog of :func:`w1_weight` over level tuples with gaps >= 2."""
    z = profile.z
    terms = [Fraction(0)] * len(z)
    for level in range(1, len(z)):
        terms[level] = comb(z[level], 2) + Fraction(z[level] * (z[level - 1] - 1), 2)
    if s == 0:
        return Fraction(1)
    # dp[j][l] = sum over j levels ending exactly at l, consecutive gaps >= 2
    prev = terms[:]
    for _ in range(2, s + 1):
        pref = [Fraction(0)] * (len(z) + 1)
        for level in range(len(z)):
            pref[level + 1] = pref[level] + prev[level]
        cur = [Fraction(0)] * len(z)
        for level in range(2, len(z)):
            cur[level] = terms[level] * pref[level - 1]
        prev = cur
    return sum(prev, Fraction(0))


def degenerate_tuple_bound(profile: HeightProfile, n: int, s: int) -> int:
    """Size bound on height-colliding surplus tuples: 3 s (s-1) 2^s n^(s-1) (max z)^(s+1)."""
    zmax = max(profile.z)
    return 3 * s * (s - 1) * 2 ** s * n ** (s - 1) * zmax ** (s + 1)


def count_degenerate_tuples(tree: LabeledTree, s: int) -> int:
    """Brute count of ordered s-tuples of admissible pairs with a height collision."""
    heights = tree.heights()
    n = tree.n
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)
             if i != j and 0 <= heights[i] - heights[j] <= 1]
    from itertools import product as iproduct

    count = 0
    for tup in iproduct(pairs, repeat=s):
        if any(abs(heights[tup[a][0]] - heights[tup[b][0]]) <= 1
               for a in range(s) for b in range(a + 1, s)):
            count += 1
    return count
