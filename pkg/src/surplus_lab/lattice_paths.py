"""Lattice paths, plane trees, labeled trees, and the conversions among them.

Conventions used throughout the package:

* An *excursion* of half-length ``n`` is a +-1 path ``f(0..2n)`` with
  ``f(0) = f(2n) = 0`` and strictly positive interior values.  These are
  exactly the contour functions of plane trees on ``n + 1`` vertices whose
  root has degree one.
* A *bridge* of half-length ``n`` is a +-1 path ``b(0..2n+1)`` with
  ``b(0) = 0`` and ``b(2n+1) = -1``.  The Vervaat transform rotates a bridge
  at its first global minimum into a path that is nonnegative on
  ``[0, 2n]`` (an "excursion shape").
* Corners of a plane tree are indexed by contour time: corner ``i`` (for
  ``1 <= i <= 2n - 1``) is the corner passed at time ``i``, at the vertex
  visited at time ``i``, so its height is ``f(i)``.  The root corner
  (time 0) is never an insertion site.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

# Default size cap for exhaustive enumeration of excursions.
ENUMERATION_CAP = 12


class EnumerationCapExceeded(ValueError):
    """Raised when an exhaustive enumeration would exceed its size cap."""


def _as_int_array(values: Sequence[int]) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class LatticeExcursion:
    """A +-1 contour path of half-length ``n``: the encoding of a plane tree."""

    __slots__ = ("values", "n")

    def __init__(self, values: Sequence[int], validate: bool = True):
        arr = _as_int_array(values)
        if len(arr) % 2 != 1 or len(arr) < 3:
            raise ValueError("excursion must have odd length 2n+1 with n >= 1")
        self.values = arr
        self.n = (len(arr) - 1) // 2
        if validate:
            steps = np.diff(arr)
            if arr[0] != 0 or arr[-1] != 0:
                raise ValueError("excursion must start and end at 0")
            if np.any(np.abs(steps) != 1):
                raise ValueError("excursion steps must be +-1")
            if len(arr) > 3 and np.any(arr[1:-1] <= 0):
                raise ValueError("excursion interior must be strictly positive")

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeExcursion) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.as_tuple())

    def __repr__(self) -> str:
        return f"LatticeExcursion({list(self.values)})"

    def as_tuple(self) -> tuple:
        return tuple(int(v) for v in self.values)

    def max_height(self) -> int:
        return int(self.values.max())

    def steps_string(self) -> str:
        return "".join("U" if d > 0 else "D" for d in np.diff(self.values))

    @classmethod
    def from_steps(cls, text: str) -> "LatticeExcursion":
        vals = [0]
        for ch in text.strip():
            if ch == "U":
                vals.append(vals[-1] + 1)
            elif ch == "D":
                vals.append(vals[-1] - 1)
            else:
                raise ValueError(f"invalid step character {ch!r}")
        return cls(vals)


class LatticeBridge:
    """A +-1 path from 0 to -1; nonnegative-before-the-end bridges encode excursion shapes."""

    __slots__ = ("values", "n")

    def __init__(self, values: Sequence[int], validate: bool = True):
        arr = _as_int_array(values)
        if len(arr) % 2 != 0 or len(arr) < 2:
            raise ValueError("bridge must have even length 2n+2 with n >= 0")
        self.values = arr
        self.n = (len(arr) - 2) // 2
        if validate:
            steps = np.diff(arr)
            if arr[0] != 0 or arr[-1] != -1:
                raise ValueError("bridge must run from 0 to -1")
            if np.any(np.abs(steps) != 1):
                raise ValueError("bridge steps must be +-1")

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeBridge) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.as_tuple())

    def __repr__(self) -> str:
        return f"LatticeBridge({list(self.values)})"

    def as_tuple(self) -> tuple:
        return tuple(int(v) for v in self.values)

    def is_excursion_shape(self) -> bool:
        """True when the path stays nonnegative before its final down-step."""
        return bool(np.all(self.values[:-1] >= 0))

    def steps_string(self) -> str:
        return "".join("U" if d > 0 else "D" for d in np.diff(self.values))


class PlaneTree:
    """Rooted ordered tree with root of degree one, vertices numbered in contour order.

    ``parent[v]`` is the parent of vertex ``v`` (``parent[0] = -1`` for the
    root), ``children[v]`` lists children left to right, ``vertex_at_time[t]``
    is the vertex visited at contour time ``t``, and ``depth[v]`` is the
    distance from the root.
    """

    __slots__ = ("n", "parent", "children", "vertex_at_time", "depth")

    def __init__(self, parent, children, vertex_at_time, depth):
        self.parent = parent
        self.children = children
        self.vertex_at_time = vertex_at_time
        self.depth = depth
        self.n = len(parent) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, PlaneTree) and self.parent == other.parent and \
            self.children == other.children

    def __hash__(self) -> int:
        return hash(tuple(self.parent))

    def __repr__(self) -> str:
        return f"PlaneTree(parens={self.to_parens()!r})"

    def num_vertices(self) -> int:
        return self.n + 1

    def height(self) -> int:
        return max(self.depth)

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (0 if v == 0 else 1)

    def to_parens(self) -> str:
        return contour_of_tree(self).steps_string().replace("U", "(").replace("D", ")")

    @classmethod
    def from_parens(cls, text: str) -> "PlaneTree":
        steps = text.strip().replace("(", "U").replace(")", "D")
        return tree_of_contour(LatticeExcursion.from_steps(steps))


def tree_of_contour(f: LatticeExcursion) -> PlaneTree:
    """Decode the plane tree whose contour function is ``f``."""
    vals = f.values.tolist()
    two_n = len(vals) - 1
    parent = [-1]
    children: list[list[int]] = [[]]
    depth = [0]
    vertex_at_time = [0] * (two_n + 1)
    stack = [0]
    nxt = 1
    for t in range(1, two_n + 1):
        if vals[t] > vals[t - 1]:
            parent.append(stack[-1])
            children.append([])
            children[stack[-1]].append(nxt)
            depth.append(vals[t])
            vertex_at_time[t] = nxt
            stack.append(nxt)
            nxt += 1
        else:
            stack.pop()
            vertex_at_time[t] = stack[-1]
    return PlaneTree(parent, children, vertex_at_time, depth)


def contour_of_tree(t: PlaneTree) -> LatticeExcursion:
    """Contour excursion of a plane tree; inverse of :func:`tree_of_contour`."""
    vals = [0]
    # iterative contour walk: (vertex, next-child pointer)
    stack = [(0, 0)]
    while stack:
        v, k = stack[-1]
        if k < len(t.children[v]):
            stack[-1] = (v, k + 1)
            c = t.children[v][k]
            vals.append(t.depth[c])
            stack.append((c, 0))
        else:
            stack.pop()
            if stack:
                vals.append(t.depth[stack[-1][0]])
    return LatticeExcursion(vals, validate=False)


def lukasiewicz_of_tree(t: PlaneTree) -> list[int]:
    """Depth-first walk stepping by (number of children - 1); ends at -1."""
    s = [0]
    for v in _preorder(t):
        s.append(s[-1] + len(t.children[v]) - 1)
    return s


def _preorder(t: PlaneTree) -> Iterator[int]:
    stack = [0]
    while stack:
        v = stack.pop()
        yield v
        stack.extend(reversed(t.children[v]))


def preorder_index(t: PlaneTree) -> list[int]:
    """Position of each vertex in the depth-first (preorder) vertex order."""
    pos = [0] * (t.n + 1)
    for k, v in enumerate(_preorder(t)):
        pos[v] = k
    return pos


@dataclass(frozen=True)
class HeightProfile:
    """Vertex counts per height: ``z[k]`` vertices at distance ``k`` from the root."""

    z: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.z)

    def __getitem__(self, k: int) -> int:
        return self.z[k] if 0 <= k < len(self.z) else 0


class LabeledTree:
    """Rooted tree on labels ``1..n``; ``parent[v] = 0`` marks the root."""

    __slots__ = ("n", "root", "parent")

    def __init__(self, n: int, root: int, parent: dict[int, int] | list[int]):
        self.n = n
        self.root = root
        if isinstance(parent, dict):
            par = [0] * (n + 1)
            for v, p in parent.items():
                par[v] = p
            parent = par
        self.parent = parent
        if parent[root] != 0:
            raise ValueError("root must have parent 0")

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledTree) and self.root == other.root and \
            self.parent == other.parent

    def __hash__(self) -> int:
        return hash((self.root, tuple(self.parent)))

    def __repr__(self) -> str:
        return f"LabeledTree(n={self.n}, root={self.root}, parent={self.parent[1:]})"

    def edges(self) -> set[frozenset]:
        return {frozenset((v, self.parent[v])) for v in range(1, self.n + 1) if v != self.root}

    def heights(self) -> list[int]:
        """Distance from the root per label (index 0 unused)."""
        h = [-1] * (self.n + 1)
        h[self.root] = 0
        for v in range(1, self.n + 1):
            if h[v] >= 0:
                continue
            chain = []
            u = v
            while h[u] < 0:
                chain.append(u)
                u = self.parent[u]
                if u == 0 or len(chain) > self.n:
                    raise ValueError("parent array is not a tree rooted at root")
            base = h[u]
            for w in reversed(chain):
                base += 1
                h[w] = base
        return h


def height_profile(t: PlaneTree | LabeledTree) -> HeightProfile:
    """Counts of vertices at each distance from the root."""
    if isinstance(t, PlaneTree):
        depths = t.depth
    else:
        depths = [d for d in t.heights()[1:]]
    z = [0] * (max(depths) + 1)
    for d in depths:
        z[d] += 1
    return HeightProfile(tuple(z))


def vervaat(b: LatticeBridge) -> LatticeBridge:
    """Cyclic shift of a bridge at its first global minimum.

    The result is nonnegative on all but its final point; applied to a uniform
    bridge the pushforward is uniform over such excursion shapes, each with
    fiber of size ``len(b) - 1`` (the cycle lemma).
    """
    vals = b.values
    tau = int(np.argmin(vals))
    if tau == len(vals) - 1:
        return b
    steps = np.diff(vals)
    rotated = np.concatenate([steps[tau:], steps[:tau]])
    out = np.concatenate([[0], np.cumsum(rotated)])
    return LatticeBridge(out, validate=False)


def excursion_from_shape(shape: LatticeBridge) -> LatticeExcursion:
    """Attach the root step: shift an excursion shape up one level and prepend 0.

    Maps the nonnegative bridge ``v(0..2m+1)`` to the contour excursion
    ``f(0) = 0, f(t) = v(t-1) + 1`` of half-length ``m + 1``.
    """
    if not shape.is_excursion_shape():
        raise ValueError("bridge is not an excursion shape")
    vals = np.concatenate([[0], shape.values + 1])
    return LatticeExcursion(vals, validate=False)


def shape_of_excursion(f: LatticeExcursion) -> LatticeBridge:
    """Inverse of :func:`excursion_from_shape`."""
    return LatticeBridge(f.values[1:] - 1, validate=False)


def enumerate_excursions(n: int, cap: int = ENUMERATION_CAP) -> list[LatticeExcursion]:
    """All contour excursions of half-length ``n``; there are Catalan(n-1) of them."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise EnumerationCapExceeded(f"n={n} exceeds enumeration cap {cap}")
    out: list[LatticeExcursion] = []
    # interior = 1 + Dyck path of length 2n-2
    path = [0] * (2 * n + 1)
    path[1] = 1
    path[2 * n - 1] = 1

    def extend(t: int) -> None:
        if t == 2 * n - 1:
            if path[t - 1] == 2:
                out.append(LatticeExcursion(list(path), validate=False))
            return
        h = path[t - 1]
        remaining = (2 * n - 1) - t
        if h + 1 - 1 <= remaining:
            path[t] = h + 1
            extend(t + 1)
        if h - 1 >= 1 and h - 1 - 1 <= remaining:
            path[t] = h - 1
            extend(t + 1)

    if n == 1:
        return [LatticeExcursion([0, 1, 0], validate=False)]
    extend(2)
    return out


def enumerate_bridges(n: int, cap: int = 8) -> list[LatticeBridge]:
    """All +-1 bridges from 0 to -1 with ``2n + 1`` steps."""
    if n > cap:
        raise EnumerationCapExceeded(f"n={n} exceeds enumeration cap {cap}")
    from itertools import combinations

    length = 2 * n + 1
    out = []
    for ups in combinations(range(length), n):
        steps = np.full(length, -1, dtype=np.int64)
        steps[list(ups)] = 1
        out.append(LatticeBridge(np.concatenate([[0], np.cumsum(steps)]), validate=False))
    return out


def catalan(k: int) -> int:
    """The k-th Catalan number."""
    from math import comb

    return comb(2 * k, k) // (k + 1)


def excursion_count(n: int) -> int:
    """Number of contour excursions of half-length n: (1/n) * C(2n-2, n-1)."""
    from math import comb

    return comb(2 * n - 2, n - 1) // n
