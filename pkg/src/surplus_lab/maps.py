"""Rooted combinatorial maps, their explorations, and unicellular gluings.

A map is stored as a rotation system on dense half-edge ids: ``sigma[h]`` is
the next half-edge clockwise around the origin vertex of ``h``, ``alpha[h]``
is the opposite half-edge, and a distinguished root half-edge marks the root
vertex (required to have degree one).  Faces are the orbits of
``h -> sigma[alpha[h]]``, matching a contour walk that always turns to the
next edge after the one it arrived by; a plane tree then has exactly one
face.  Genus comes from Euler's formula.

Surplus edges are recorded against a spanning plane tree as a decoration: a
list of corner indices (contour times) plus small integer tags that order
parallel insertions sharing a corner.  ``insert_edges`` realizes a decorated
tree as a map; the breadth-first and depth-first explorations invert it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations, product

import numpy as np

from .lattice_paths import (
    EnumerationCapExceeded,
    LatticeExcursion,
    PlaneTree,
    contour_of_tree,
    tree_of_contour,
)

SG_CAP = 3


class RootedMap:
    """Rooted map on half-edges 0..2E-1 with clockwise rotations."""

    __slots__ = ("sigma", "alpha", "root", "origin", "num_vertices")

    def __init__(self, sigma, alpha, root: int, check: bool = True):
        self.sigma = list(sigma)
        self.alpha = list(alpha)
        self.root = root
        self.origin, self.num_vertices = self._orbit_labels()
        if check:
            self._check()

    # -- structure -------------------------------------------------------

    def _orbit_labels(self):
        n_half = len(self.sigma)
        origin = [-1] * n_half
        label = 0
        for h0 in range(n_half):
            if origin[h0] >= 0:
                continue
            h = h0
            while origin[h] < 0:
                origin[h] = label
                h = self.sigma[h]
            label += 1
        return origin, label

    def _check(self):
        n_half = len(self.sigma)
        if n_half % 2:
            raise ValueError("odd number of half-edges")
        if sorted(self.sigma) != list(range(n_half)):
            raise ValueError("rotation is not a permutation")
        if len(self.alpha) != n_half:
            raise ValueError("involution length mismatch")
        for h in range(n_half):
            if self.alpha[h] == h or self.alpha[self.alpha[h]] != h:
                raise ValueError("involution is not fixed-point-free")
        if not 0 <= self.root < n_half:
            raise ValueError("root half-edge out of range")
        # connectivity: half-edges reachable via sigma and alpha
        seen = [False] * n_half
        stack = [self.root]
        seen[self.root] = True
        count = 0
        while stack:
            h = stack.pop()
            count += 1
            for g in (self.sigma[h], self.alpha[h]):
                if not seen[g]:
                    seen[g] = True
                    stack.append(g)
        if count != n_half:
            raise ValueError("map is not connected")
        if self.degree(self.origin[self.root]) != 1:
            raise ValueError("root vertex must have degree one")

    @property
    def num_half_edges(self) -> int:
        return len(self.sigma)

    @property
    def num_edges(self) -> int:
        return self.num_half_edges // 2

    @property
    def n(self) -> int:
        """Number of non-root vertices."""
        return self.num_vertices - 1

    @property
    def surplus(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def degree(self, v: int) -> int:
        return sum(1 for h in range(self.num_half_edges) if self.origin[h] == v)

    def rotation_cycles(self) -> list[list[int]]:
        cycles = []
        seen = [False] * self.num_half_edges
        for h0 in range(self.num_half_edges):
            if seen[h0]:
                continue
            cyc = []
            h = h0
            while not seen[h]:
                seen[h] = True
                cyc.append(h)
                h = self.sigma[h]
            cycles.append(cyc)
        return cycles

    # -- faces and genus ---------------------------------------------------

    def face_next(self, h: int) -> int:
        return self.sigma[self.alpha[h]]

    def faces(self) -> list[list[int]]:
        """Orbits of the face permutation (rotation after the involution)."""
        seen = [False] * self.num_half_edges
        out = []
        for h0 in range(self.num_half_edges):
            if seen[h0]:
                continue
            cyc = []
            h = h0
            while not seen[h]:
                seen[h] = True
                cyc.append(h)
                h = self.face_next(h)
            out.append(cyc)
        return out

    def genus(self) -> int:
        chi = self.num_vertices - self.num_edges + len(self.faces())
        if chi % 2:
            raise ValueError("odd Euler characteristic: corrupt map")
        return (2 - chi) // 2

    def is_unicellular(self) -> bool:
        return len(self.faces()) == 1

    # -- identity ----------------------------------------------------------

    def canonical_key(self) -> tuple:
        """Renumber half-edges by a deterministic root-first traversal.

        Two rooted maps are isomorphic exactly when their keys agree: the
        traversal order is determined by the structure and the root alone.
        """
        order: dict[int, int] = {}
        rev: list[int] = []
        root_v = self.origin[self.root]
        vqueue = [(root_v, self.root)]
        seen_v = {root_v}
        qi = 0
        while qi < len(vqueue):
            _, start = vqueue[qi]
            qi += 1
            h = start
            while True:
                order[h] = len(rev)
                rev.append(h)
                back = self.alpha[h]
                w = self.origin[back]
                if w not in seen_v:
                    seen_v.add(w)
                    vqueue.append((w, back))
                h = self.sigma[h]
                if h == start:
                    break
        new_alpha = tuple(order[self.alpha[g]] for g in rev)
        new_sigma = tuple(order[self.sigma[g]] for g in rev)
        return (new_alpha, new_sigma)

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedMap) and self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        return f"RootedMap(V={self.num_vertices}, E={self.num_edges}, genus={self.genus()})"

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "n": self.n,
            "s": self.surplus,
            "root": self.root,
            "involution": list(self.alpha),
            "rotation": self.rotation_cycles(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RootedMap":
        try:
            alpha = list(data["involution"])
            cycles = data["rotation"]
            root = data["root"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"map JSON missing field: {exc}") from exc
        n_half = len(alpha)
        flat = [h for cyc in cycles for h in cyc]
        if sorted(flat) != list(range(n_half)):
            raise ValueError("rotation cycles are not a permutation of the half-edges")
        sigma = [0] * n_half
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                sigma[a] = b
        m = cls(sigma, alpha, root)
        if "n" in data and data["n"] != m.n:
            raise ValueError("half-edge data inconsistent with declared n")
        if "s" in data and data["s"] != m.surplus:
            raise ValueError("half-edge data inconsistent with declared s")
        return m


# -- decorations ------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleCorners:
    """Corner indices and insertion tags recording surplus edges against a tree.

    ``indices[2j], indices[2j+1]`` are the contour times of the two corners
    joined by the j-th surplus edge, with the earlier corner first; ``tags``
    order parallel insertions sharing a corner (tag 1 sits furthest from the
    corner's reference edge, larger tags closer).
    """

    mode: str  # "bf" or "df"
    indices: tuple[int, ...]
    tags: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.indices) // 2

    def pairs(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return [
            ((self.indices[2 * j], self.tags[2 * j]), (self.indices[2 * j + 1], self.tags[2 * j + 1]))
            for j in range(self.s)
        ]

    def validate(self, f: LatticeExcursion) -> None:
        vals = f.values
        two_n = 2 * f.n
        if len(self.indices) != len(self.tags) or len(self.indices) % 2:
            raise ValueError("indices and tags must have even equal length")
        if self.mode not in ("bf", "df"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for i in self.indices:
            if not 1 <= i <= two_n - 1:
                raise ValueError(f"corner index {i} outside [1, {two_n - 1}]")
        prev = None
        for (i1, k1), (i2, k2) in self.pairs():
            if i1 > i2 or (i1 == i2 and k1 >= k2):
                raise ValueError("pair not in canonical order")
            if self.mode == "bf":
                if vals[i2] not in (vals[i1], vals[i1] - 1):
                    raise ValueError(f"corner pair ({i1},{i2}) violates the height rule")
            else:
                if min(vals[i1:i2 + 1]) != vals[i2]:
                    raise ValueError(f"corner {i2} is not at an ancestor of corner {i1}")
            key = (i1, i2, k1)
            if prev is not None and key <= prev:
                raise ValueError("pairs not sorted canonically")
            prev = key
        # tags within each equal-index block form a permutation of 1..block size
        blocks: dict[int, list[int]] = {}
        for i, k in zip(self.indices, self.tags):
            blocks.setdefault(i, []).append(k)
        for i, ks in blocks.items():
            if sorted(ks) != list(range(1, len(ks) + 1)):
                raise ValueError(f"tags at corner {i} are not a permutation of 1..{len(ks)}")


# -- plane tree as a map, and edge insertion ---------------------------------


def _tree_half_structures(tree: PlaneTree):
    """Rotation lists, contour half sequence, and corner reference halves.

    Tree edge to vertex ``v >= 1`` has down-half ``2(v-1)`` (parent to v) and
    up-half ``2(v-1)+1``.  The contour traverses halves ``f_1 .. f_{2n}``;
    corner ``i`` sits immediately before ``f_{i+1}`` at the vertex visited at
    time ``i``.
    """
    n = tree.n
    down = lambda v: 2 * (v - 1)
    up = lambda v: 2 * (v - 1) + 1
    rotations: list[list[int]] = [[] for _ in range(n + 1)]
    rotations[0] = [down(c) for c in tree.children[0]]
    for v in range(1, n + 1):
        rotations[v] = [up(v)] + [down(c) for c in tree.children[v]]
    seq: list[int] = []
    stack: list[list[int]] = [[0, 0]]
    while stack:
        v, k = stack[-1]
        if k < len(tree.children[v]):
            stack[-1][1] += 1
            c = tree.children[v][k]
            seq.append(down(c))
            stack.append([c, 0])
        else:
            stack.pop()
            if stack:
                seq.append(up(v))
    origin_of_half = [0] * (2 * n)
    for v in range(1, n + 1):
        origin_of_half[down(v)] = tree.parent[v]
        origin_of_half[up(v)] = v
    return rotations, seq, origin_of_half


def tree_as_map(tree: PlaneTree) -> RootedMap:
    """The plane tree itself as a rooted map (no surplus edges)."""
    return insert_edges(tree, AdmissibleCorners("bf", (), ()))


def insert_edges(tree: PlaneTree, corners: AdmissibleCorners, validate: bool = True) -> RootedMap:
    """Add one edge per decoration pair between the named corners of the tree.

    Within a corner, inserted half-edges are ordered by increasing tag toward
    the corner's reference edge.  Inverse of the matching exploration.
    """
    if validate and corners.s:
        corners.validate(contour_of_tree(tree))
    n = tree.n
    rotations, seq, _ = _tree_half_structures(tree)
    # reference half of corner i is the (i+1)-th contour half
    runs: dict[int, list[tuple[int, int]]] = {}
    for j in range(corners.s):
        for end in range(2):
            i = corners.indices[2 * j + end]
            k = corners.tags[2 * j + end]
            runs.setdefault(seq[i], []).append((k, 2 * n + 2 * j + end))
    n_half = 2 * n + 2 * corners.s
    alpha = [0] * n_half
    for v in range(1, n + 1):
        alpha[2 * (v - 1)] = 2 * (v - 1) + 1
        alpha[2 * (v - 1) + 1] = 2 * (v - 1)
    for j in range(corners.s):
        alpha[2 * n + 2 * j] = 2 * n + 2 * j + 1
        alpha[2 * n + 2 * j + 1] = 2 * n + 2 * j
    sigma = [0] * n_half
    for rot in rotations:
        full: list[int] = []
        for h in rot:
            if h in runs:
                full.extend(x for _, x in sorted(runs[h]))
            full.append(h)
        for a, b in zip(full, full[1:] + full[:1]):
            sigma[a] = b
    return RootedMap(sigma, alpha, root=0, check=validate)


# -- explorations -------------------------------------------------------------


def _require_msns(m: RootedMap) -> None:
    if m.degree(m.origin[m.root]) != 1:
        raise ValueError("exploration requires a root vertex of degree one")


def _bf_tree_halves(m: RootedMap) -> set[int]:
    """Half-edges of the breadth-first spanning tree (rotation-order scan)."""
    tree = {m.root, m.alpha[m.root]}
    visited = {m.origin[m.root], m.origin[m.alpha[m.root]]}
    queue = [m.root]
    qi = 0
    while qi < len(queue):
        e = queue[qi]
        qi += 1
        back = m.alpha[e]
        h = m.sigma[back]
        while h != back:
            w = m.origin[m.alpha[h]]
            if w not in visited:
                visited.add(w)
                tree.add(h)
                tree.add(m.alpha[h])
                queue.append(h)
            h = m.sigma[h]
    return tree


def _df_tree_halves(m: RootedMap) -> set[int]:
    """Half-edges kept by the contour walk that deletes cycle-closing edges."""
    tree = {m.root, m.alpha[m.root]}
    visited = {m.origin[m.root], m.origin[m.alpha[m.root]]}
    deleted: set[int] = set()
    two_n = 2 * (m.num_vertices - 1)
    cur = m.root
    i = 1
    while i < two_n:
        h = m.sigma[m.alpha[cur]]
        while h in deleted:
            h = m.sigma[h]
        if h in tree:
            cur = h
            i += 1
            continue
        w = m.origin[m.alpha[h]]
        if w not in visited:
            visited.add(w)
            tree.add(h)
            tree.add(m.alpha[h])
            cur = h
            i += 1
        else:
            deleted.add(h)
            deleted.add(m.alpha[h])
    return tree


def _decoration_from_tree(m: RootedMap, tree_halves: set[int], mode: str):
    two_n = len(tree_halves)
    # contour sequence of the spanning tree inside m
    seq = [m.root]
    time_of = {m.root: 1}
    cur = m.root
    for k in range(2, two_n + 1):
        h = m.sigma[m.alpha[cur]]
        while h not in tree_halves:
            h = m.sigma[h]
        seq.append(h)
        time_of[h] = k
        cur = h
    vals = [0]
    tree_visited = {m.origin[m.root]}
    for h in seq:
        w = m.origin[m.alpha[h]]
        if w not in tree_visited:
            tree_visited.add(w)
            vals.append(vals[-1] + 1)
        else:
            vals.append(vals[-1] - 1)
    exc = LatticeExcursion(vals)
    ptree = tree_of_contour(exc)
    # corners and ranks of the surplus half-edges, one rotation walk per vertex
    surplus = [h for h in range(m.num_half_edges) if h not in tree_halves]
    corner_of: dict[int, int] = {}
    rank_of: dict[int, int] = {}
    done_vertices: set[int] = set()
    for h0 in surplus:
        v = m.origin[h0]
        if v in done_vertices:
            continue
        done_vertices.add(v)
        rot = []
        h = h0
        while True:
            rot.append(h)
            h = m.sigma[h]
            if h == h0:
                break
        start = next(idx for idx, g in enumerate(rot) if g in tree_halves)
        ordered = rot[start:] + rot[:start]
        run: list[int] = []
        for g in ordered[1:] + ordered[:1]:
            if g in tree_halves:
                for r, x in enumerate(run):
                    corner_of[x] = time_of[g] - 1
                    rank_of[x] = r + 1
                run = []
            else:
                run.append(g)
    pair_list = []
    seen: set[int] = set()
    for h in surplus:
        if h in seen:
            continue
        seen.add(h)
        seen.add(m.alpha[h])
        a = (corner_of[h], rank_of[h])
        b = (corner_of[m.alpha[h]], rank_of[m.alpha[h]])
        if (b[0], b[1]) < (a[0], a[1]):
            a, b = b, a
        pair_list.append((a, b))
    pair_list.sort(key=lambda p: (p[0][0], p[1][0], p[0][1]))
    indices = tuple(x for p in pair_list for x in (p[0][0], p[1][0]))
    tags = tuple(x for p in pair_list for x in (p[0][1], p[1][1]))
    xi = AdmissibleCorners(mode, indices, tags)
    xi.validate(exc)
    return ptree, xi


def bf_explore(m: RootedMap):
    """Breadth-first spanning tree and the decoration that recovers ``m``."""
    _require_msns(m)
    return _decoration_from_tree(m, _bf_tree_halves(m), "bf")


def df_explore(m: RootedMap):
    """Depth-first (contour) spanning tree and the decoration that recovers ``m``."""
    _require_msns(m)
    return _decoration_from_tree(m, _df_tree_halves(m), "df")


# -- enumeration of decorations ----------------------------------------------


def admissible_pairs(f: LatticeExcursion, mode: str) -> list[tuple[int, int]]:
    """All ordered corner pairs (i1 <= i2) a single surplus edge may join."""
    from .local_time import bf_index_set, df_index_set

    two_n = 2 * f.n
    index_set = bf_index_set if mode == "bf" else df_index_set
    return [(i, j) for i in range(1, two_n) for j in index_set(f, i)]


def enumerate_admissible(tree: PlaneTree, s: int, mode: str, cap: int = 8) -> list[AdmissibleCorners]:
    """All decorations of ``tree`` with ``s`` surplus edges, in canonical form."""
    if tree.n > cap or s > 4:
        raise EnumerationCapExceeded(f"n={tree.n}, s={s} too large for decoration enumeration")
    if s == 0:
        return [AdmissibleCorners(mode, (), ())]
    f = contour_of_tree(tree)
    pairs = admissible_pairs(f, mode)
    out: set[tuple] = set()
    for multi in combinations_with_replacement(range(len(pairs)), s):
        chosen = [pairs[i] for i in multi]
        ends: dict[int, list[tuple[int, int]]] = {}
        for j, (i1, i2) in enumerate(chosen):
            ends.setdefault(i1, []).append((j, 0))
            ends.setdefault(i2, []).append((j, 1))
        corners_list = sorted(ends)
        tag_choices = [permutations(range(1, len(ends[c]) + 1)) for c in corners_list]
        for assignment in product(*tag_choices):
            tag_of: dict[tuple[int, int], int] = {}
            for c, perm in zip(corners_list, assignment):
                for (j, end), k in zip(ends[c], perm):
                    tag_of[(j, end)] = k
            tagged = []
            ok = True
            for j, (i1, i2) in enumerate(chosen):
                k1, k2 = tag_of[(j, 0)], tag_of[(j, 1)]
                if i1 == i2 and k1 > k2:
                    ok = False
                    break
                tagged.append((i1, k1, i2, k2))
            if not ok:
                continue
            tagged.sort(key=lambda p: (p[0], p[2], p[1]))
            out.add(tuple(tagged))
    result = []
    for tagged in sorted(out):
        indices = tuple(x for p in tagged for x in (p[0], p[2]))
        tags = tuple(x for p in tagged for x in (p[1], p[3]))
        xi = AdmissibleCorners(mode, indices, tags)
        xi.validate(f)
        result.append(xi)
    return result


# -- metric observables --------------------------------------------------------


def adjacency(m: RootedMap) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(m.num_vertices)]
    for h in range(m.num_half_edges):
        adj[m.origin[h]].append(m.origin[m.alpha[h]])
    return adj


def bfs_distances(adj: list[list[int]], start: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[start] = 0
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            du = dist[u] + 1
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = du
                    nxt.append(v)
        frontier = nxt
    return dist


@dataclass(frozen=True)
class RootMetric:
    distances: tuple[int, ...]
    radius: int
    level_counts: tuple[int, ...]  # vertices at each distance from the root

    def ball_volume(self, r: int) -> int:
        return sum(self.level_counts[: r + 1])


def metric_from_root(m: RootedMap) -> RootMetric:
    """Graph distances from the root vertex, with radius and ball volumes."""
    dist = bfs_distances(adjacency(m), m.origin[m.root])
    radius = max(dist)
    levels = [0] * (radius + 1)
    for d in dist:
        levels[d] += 1
    return RootMetric(tuple(dist), radius, tuple(levels))


# -- entangled pairings -------------------------------------------------------


@dataclass(frozen=True)
class PermutationPairing:
    """A fixed-point-free involution of [4g] written as 2g canonical transpositions."""

    transpositions: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = [x for t in self.transpositions for x in t]
        size = 2 * len(self.transpositions)
        if sorted(flat) != list(range(1, size + 1)):
            raise ValueError("transpositions must partition 1..4g")
        if len(self.transpositions) % 2:
            raise ValueError("a pairing of [4g] needs an even number of transpositions")
        canon = canonical_transpositions(self.transpositions)
        if canon != self.transpositions:
            object.__setattr__(self, "transpositions", canon)

    @property
    def g(self) -> int:
        return len(self.transpositions) // 2

    def partner(self, i: int) -> int:
        for a, b in self.transpositions:
            if i == a:
                return b
            if i == b:
                return a
        raise KeyError(i)

    def partner_array(self) -> list[int]:
        out = [0] * (4 * self.g + 1)
        for a, b in self.transpositions:
            out[a] = b
            out[b] = a
        return out

    def __str__(self) -> str:
        return "".join(f"({a},{b})" for a, b in self.transpositions)

    @classmethod
    def parse(cls, text: str) -> "PermutationPairing":
        parts = text.replace(" ", "").strip()
        if not parts.startswith("(") or not parts.endswith(")"):
            raise ValueError(f"cannot parse pairing {text!r}")
        trans = []
        for chunk in parts[1:-1].split(")("):
            a, b = chunk.split(",")
            trans.append((int(a), int(b)))
        return cls(canonical_transpositions(trans))


def canonical_transpositions(trans) -> tuple[tuple[int, int], ...]:
    pairs = tuple(sorted((min(a, b), max(a, b)) for a, b in trans))
    return pairs


def is_entangled(pairing: PermutationPairing, order: str = "pairing-first") -> bool:
    """True when composing with the full cycle (1,2,...,4g) yields a single cycle.

    ``order`` selects which permutation applies first; the two orders always
    agree (the composites are conjugate) and both are exposed so the
    agreement can be asserted.
    """
    size = 4 * pairing.g
    partner = pairing.partner_array()
    if order == "pairing-first":
        nxt = [0] * (size + 1)
        for i in range(1, size + 1):
            nxt[i] = partner[i] % size + 1
    elif order == "cycle-first":
        nxt = [0] * (size + 1)
        for i in range(1, size + 1):
            nxt[i] = partner[i % size + 1]
    else:
        raise ValueError(f"unknown composition order {order!r}")
    seen = 1
    cur = nxt[1]
    while cur != 1:
        cur = nxt[cur]
        seen += 1
        if seen > size:
            raise RuntimeError("composition is not a permutation")
    return seen == size


def entangled_pairings(g: int, cap: int = SG_CAP) -> list[PermutationPairing]:
    """All pairings of [4g] whose gluing leaves a single face (one boundary cycle)."""
    if g > cap:
        raise EnumerationCapExceeded(f"g={g} exceeds pairing cap {cap}")
    out = []
    for pairing in _all_pairings(4 * g):
        p = PermutationPairing(pairing)
        if is_entangled(p):
            out.append(p)
    return out


def _all_pairings(size: int):
    """Perfect matchings of 1..size as canonical transposition tuples."""
    items = list(range(1, size + 1))

    def rec(rest: list[int]):
        if not rest:
            yield ()
            return
        a = rest[0]
        for idx in range(1, len(rest)):
            b = rest[idx]
            tail = rest[1:idx] + rest[idx + 1:]
            for sub in rec(tail):
                yield ((a, b),) + sub

    yield from rec(items)


# -- unicellular gluing ---------------------------------------------------------


def glue_decoration(pairing: PermutationPairing, corners) -> AdmissibleCorners:
    """Decoration that joins increasing corners ``r_1 < ... < r_4g`` per the pairing."""
    corners = tuple(corners)
    if len(corners) != 4 * pairing.g:
        raise ValueError("need exactly 4g corners")
    if any(corners[i] >= corners[i + 1] for i in range(len(corners) - 1)):
        raise ValueError("corners must be strictly increasing")
    pair_list = []
    for a, b in pairing.transpositions:
        pair_list.append(((corners[a - 1], 1), (corners[b - 1], 1)))
    pair_list.sort(key=lambda p: (p[0][0], p[1][0], p[0][1]))
    indices = tuple(x for p in pair_list for x in (p[0][0], p[1][0]))
    tags = tuple(x for p in pair_list for x in (p[0][1], p[1][1]))
    return AdmissibleCorners("bf", indices, tags)


def glue_heights_ok(f: LatticeExcursion, pairing: PermutationPairing, corners) -> bool:
    """Whether every glued pair drops by at most one level (first corner higher)."""
    corners = tuple(corners)
    vals = f.values
    for a, b in pairing.transpositions:
        if not 0 <= vals[corners[a - 1]] - vals[corners[b - 1]] <= 1:
            return False
    return True


def unicellular_glue(tree: PlaneTree, pairing: PermutationPairing, corners,
                     strict: bool = False) -> tuple[RootedMap, bool]:
    """Glue ``4g`` corners of a plane tree in pairs; report unicellularity.

    With ``strict=True`` the corner heights must satisfy the one-level drop
    rule, which guarantees the glued map's breadth-first exploration returns
    the original tree with this decoration.
    """
    f = contour_of_tree(tree)
    if strict and not glue_heights_ok(f, pairing, corners):
        raise ValueError("corner heights violate the one-level drop rule")
    xi = glue_decoration(pairing, corners)
    m = insert_edges(tree, xi, validate=False)
    return m, m.is_unicellular()


# -- admissible corner tuples for unicellular gluings ---------------------------


def pairing_tuple_count(f: LatticeExcursion, pairing: PermutationPairing) -> int:
    """Number of increasing corner tuples gluable along ``pairing``.

    Counts tuples ``r_1 < ... < r_4g`` in ``[1, 2n-1]`` such that each glued
    pair of corners drops by zero or one level.
    """
    if pairing.g == 1:
        return _tuple_count_genus_one(f)
    return _tuple_count_general(f, pairing)


def _prefix_suffix_tables(f: LatticeExcursion):
    """Cumulative per-level corner counts: PC[y, t] counts corners <= t, SC[y, t] >= t."""
    vals = f.values
    two_n = 2 * f.n
    maxh = int(vals.max())
    ind = np.zeros((maxh + 2, two_n + 1), dtype=np.int64)
    ind[vals[1:two_n], np.arange(1, two_n)] = 1
    pc = np.cumsum(ind, axis=1)
    sc = np.cumsum(ind[:, ::-1], axis=1)[:, ::-1]
    return pc, sc


def _tuple_count_genus_one(f: LatticeExcursion) -> int:
    """O(n^2) count for the single genus-one pairing (1,3)(2,4)."""
    vals = f.values
    two_n = 2 * f.n
    if two_n - 1 < 4:
        return 0
    pc, sc = _prefix_suffix_tables(f)
    h = vals
    total = 0
    for r3 in range(3, two_n - 1):
        h3 = h[r3]
        # r1 < r2 needs level h3 or h3+1; r4 > r3 needs level h[r2] or h[r2]-1
        a = pc[h3, 0:r3 - 1] + pc[h3 + 1, 0:r3 - 1]
        r2_slice = h[1:r3]
        b = sc[r2_slice, r3 + 1] + sc[r2_slice - 1, r3 + 1]
        total += int(np.dot(a, b))
    return total


def _pair_positions(pairing: PermutationPairing):
    """(low position, high position) per transposition, by position in 1..4g."""
    return [(a, b) for a, b in pairing.transpositions]


def _tuple_count_general(f: LatticeExcursion, pairing: PermutationPairing) -> int:
    vals = f.values.tolist()
    two_n = len(vals) - 1
    size = 4 * pairing.g
    close_at = {b: a for a, b in _pair_positions(pairing)}
    chosen = [0] * (size + 1)

    def rec(pos: int, start: int) -> int:
        if pos > size:
            return 1
        total = 0
        for t in range(start, two_n - (size - pos)):
            if pos in close_at:
                ha = vals[chosen[close_at[pos]]]
                if not 0 <= ha - vals[t] <= 1:
                    continue
            chosen[pos] = t
            total += rec(pos + 1, t + 1)
        return total

    return rec(1, 1)


def enumerate_pairing_tuples(f: LatticeExcursion, pairing: PermutationPairing):
    """Yield every increasing gluable corner tuple (small sizes only)."""
    vals = f.values.tolist()
    two_n = len(vals) - 1
    size = 4 * pairing.g
    close_at = {b: a for a, b in _pair_positions(pairing)}
    chosen = [0] * (size + 1)

    def rec(pos: int, start: int):
        if pos > size:
            yield tuple(chosen[1:])
            return
        for t in range(start, two_n - (size - pos)):
            if pos in close_at:
                ha = vals[chosen[close_at[pos]]]
                if not 0 <= ha - vals[t] <= 1:
                    continue
            chosen[pos] = t
            yield from rec(pos + 1, t + 1)

    yield from rec(1, 1)
