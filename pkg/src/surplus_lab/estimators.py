"""Statistical estimators and distributional identity checks.

Scaling conventions are fixed once so that different routes are comparable:
contour time is scaled by ``2n``, path heights by ``sqrt(2n)``, and map
distances by ``sqrt(n)`` with an extra ``sqrt(2)`` on the map side.  Radii,
two-point distances, and profiles estimated through maps, through tilted
excursions, and through weighted labeled trees then target the same limits.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi, sqrt

import numpy as np

from .lattice_paths import (
    enumerate_excursions,
    excursion_count,
    height_profile,
)
from .local_time import (
    area_functional,
    inverse_height_functional,
    level_occupancy,
    sq_localtime_functional,
)
from .samplers import (
    DegenerateEnsembleError,
    RngStream,
    TiltSample,
    WeightedEnsemble,
    decoration_count,
    decoration_count_gap,
    sample_labeled_tree,
    sample_uniform_excursion,
    tilted_ensemble,
    ws_weight,
)

WRIGHT_CAP = 12


# -- empirical laws and the KS statistic ------------------------------------------


@dataclass
class EmpiricalLaw:
    """Weighted scalar sample; weights normalized to a probability vector."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if len(v) == 0:
            raise ValueError("empirical law needs at least one sample")
        if len(v) != len(w):
            raise ValueError("values and weights length mismatch")
        if not np.all(np.isfinite(w)) or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be nonnegative, finite, not all zero")
        order = np.argsort(v, kind="stable")
        self.values = v[order]
        self.weights = w[order] / w[order].sum()

    @classmethod
    def from_ensemble(cls, ens: WeightedEnsemble, column: str) -> "EmpiricalLaw":
        return cls(ens.columns[column], ens.weights)

    def cdf_at(self, xs: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.values, xs, side="right")
        return np.where(idx > 0, cum[np.minimum(idx - 1, len(cum) - 1)], 0.0)

    def mean(self) -> float:
        return float(np.dot(self.weights, self.values))

    def std_error(self) -> float:
        """Delta-method standard error of the weighted mean."""
        resid = self.values - self.mean()
        return float(np.sqrt(np.sum((self.weights * resid) ** 2)))


def ks_distance(a: EmpiricalLaw, b: EmpiricalLaw) -> float:
    """Sup difference of the weighted empirical CDFs."""
    grid = np.concatenate([a.values, b.values])
    return float(np.max(np.abs(a.cdf_at(grid) - b.cdf_at(grid))))


def ks_two_sample_critical(m: int, n: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at level alpha."""
    c = sqrt(-np.log(alpha / 2.0) / 2.0)
    return c * sqrt((m + n) / (m * n))


# -- radius, two-point, and profile laws --------------------------------------------


def _map_scale(n: int) -> float:
    return sqrt(2.0 / n)


@dataclass
class RadiusLaws:
    map_law: EmpiricalLaw
    bf_law: EmpiricalLaw
    df_law: EmpiricalLaw
    ks_map_bf: float
    ks_bf_df: float
    ks_map_df: float
    ess: dict
    ensembles: dict


def radius_laws(n: int, s: int, reps: int, rng: RngStream) -> RadiusLaws:
    """Three routes to the same radius law.

    Map route: radius of weighted uniform-map samples scaled by
    ``sqrt(2/n)``.  Contour route: twice the maximum of the tilted excursion
    over ``sqrt(2n)``.  Inverse-height route: the reciprocal-height sum under
    the depth-first tilt over ``sqrt(2n)``.
    """
    root = sqrt(2.0 * n)
    map_ens = tilted_ensemble(
        n, s, "bf", reps, rng.substream(0),
        {"radius": lambda smp: _map_scale(n) * max(smp.distances_from_root())},
    )
    bf_ens = tilted_ensemble(
        n, s, "bf", reps, rng.substream(1),
        {"sup": lambda smp: 2.0 * smp.exc.max_height() / root},
    )
    df_ens = tilted_ensemble(
        n, s, "df", reps, rng.substream(2),
        {"invheight": lambda smp: inverse_height_functional(smp.exc).scaled},
    )
    law_a = EmpiricalLaw.from_ensemble(map_ens, "radius")
    law_b = EmpiricalLaw.from_ensemble(bf_ens, "sup")
    law_c = EmpiricalLaw.from_ensemble(df_ens, "invheight")
    return RadiusLaws(
        law_a, law_b, law_c,
        ks_map_bf=ks_distance(law_a, law_b),
        ks_bf_df=ks_distance(law_b, law_c),
        ks_map_df=ks_distance(law_a, law_c),
        ess={"map": map_ens.ess(), "bf": bf_ens.ess(), "df": df_ens.ess()},
        ensembles={"map": map_ens, "bf": bf_ens, "df": df_ens},
    )


@dataclass
class TwoPointLaws:
    map_law: EmpiricalLaw
    excursion_law: EmpiricalLaw
    ks: float
    ess: dict
    ensembles: dict


def _two_point_map_functional(n: int):
    scale = _map_scale(n)

    def fn(smp: TiltSample) -> float:
        x1 = int(smp.gen.integers(1, n + 1))
        x2 = int(smp.gen.integers(1, n + 1))
        return scale * smp.graph_distance(x1, x2)

    return fn


def _two_point_exc_functional(n: int):
    root = sqrt(2.0 * n)

    def fn(smp: TiltSample) -> float:
        t = int(smp.gen.random() * 2 * n)
        return 2.0 * smp.vals[t] / root

    return fn


def two_point_law(n: int, s: int, reps: int, rng: RngStream) -> TwoPointLaws:
    """Distance between two uniform non-root vertices vs. the contour height
    at a uniform time, both under the breadth-first tilt.

    At ``n = 1`` there is a single non-root vertex and the map side is a
    point mass at zero.
    """
    map_ens = tilted_ensemble(n, s, "bf", reps, rng.substream(0),
                              {"dist": _two_point_map_functional(n)})
    exc_ens = tilted_ensemble(n, s, "bf", reps, rng.substream(1),
                              {"height": _two_point_exc_functional(n)})
    law_m = EmpiricalLaw.from_ensemble(map_ens, "dist")
    law_e = EmpiricalLaw.from_ensemble(exc_ens, "height")
    return TwoPointLaws(law_m, law_e, ks_distance(law_m, law_e),
                        {"map": map_ens.ess(), "excursion": exc_ens.ess()},
                        {"map": map_ens, "excursion": exc_ens})


DEFAULT_PROFILE_GRID = tuple(round(0.1 * k, 1) for k in range(31))


@dataclass
class ProfileLaws:
    grid: np.ndarray
    mean_map: np.ndarray
    mean_tree: np.ndarray
    mean_localtime: np.ndarray
    sup_map_vs_tree: float
    ess: dict
    mass_map: float
    mass_tree: float


def _profile_from_levels(levels, positions: np.ndarray, value_scale: float) -> np.ndarray:
    arr = np.zeros(len(positions))
    ok = positions < len(levels)
    arr[ok] = np.asarray(levels, dtype=np.float64)[positions[ok]] * value_scale
    return arr


def profile_laws(n: int, s: int, reps: int, rng: RngStream,
                 grid=DEFAULT_PROFILE_GRID) -> ProfileLaws:
    """Mean rescaled distance profiles via maps, weighted labeled trees, and
    the local time of the tilted contour.

    Map route: BFS level counts at level ``floor(r sqrt(n/2))`` scaled by
    ``1/sqrt(2n)``.  Tree route: height profiles of uniform labeled trees
    weighted by the symmetrized-tree weight, read at ``floor(r sqrt(n))``
    and scaled by ``1/sqrt(n)``.  Local-time route: half the terminal level
    occupancy at ``floor(r sqrt(2n)/2)`` scaled by ``1/sqrt(2n)``.
    """
    if s < 1:
        raise ValueError("the weighted-tree route needs s >= 1")
    grid = np.asarray(grid, dtype=np.float64)
    root2n = sqrt(2.0 * n)
    pos_map = np.floor(grid * sqrt(n / 2.0)).astype(np.int64)
    pos_lt = np.floor(grid * root2n / 2.0).astype(np.int64)
    pos_tree = np.floor(grid * sqrt(n)).astype(np.int64)

    def map_profile(smp: TiltSample) -> np.ndarray:
        dist = smp.distances_from_root()
        levels = np.bincount(np.asarray(dist))
        return _profile_from_levels(levels, pos_map, 1.0 / root2n)

    def localtime_profile(smp: TiltSample) -> np.ndarray:
        occ = level_occupancy(smp.exc)
        return _profile_from_levels(occ, pos_lt, 0.5 / root2n)

    map_ens = tilted_ensemble(
        n, s, "bf", reps, rng.substream(0),
        {"profile": map_profile, "mass": lambda smp: (smp.tree().n + 1) / float(n),
         "lt_profile": localtime_profile},
    )
    # weighted labeled-tree route (its own proposal; replicate r uses substream (1, r))
    tree_rows = np.empty((reps, len(grid)))
    tree_mass = np.empty(reps)
    tree_w = np.empty(reps)
    for r in range(reps):
        gen = rng.substream(1, r).generator()
        tree = sample_labeled_tree(n, gen)
        prof = height_profile(tree)
        tree_w[r] = float(ws_weight(prof, s))
        z = np.asarray(prof.z, dtype=np.float64)
        tree_rows[r] = _profile_from_levels(z, pos_tree, 1.0 / sqrt(n))
        tree_mass[r] = prof.total / float(n)
    if not np.any(tree_w > 0):
        raise DegenerateEnsembleError(f"all tree weights vanished at n={n}, s={s}")
    tree_ens = WeightedEnsemble(n=n, mode="tree-w", tilt=s, proposal="uniform-labeled-tree",
                                seed=rng.seed, stream=rng.path + (1,), weights=tree_w,
                                columns={"profile": tree_rows, "mass": tree_mass})
    mean_map, _ = map_ens.estimate("profile")
    mean_lt, _ = map_ens.estimate("lt_profile")
    mean_tree, _ = tree_ens.estimate("profile")
    mass_map, _ = map_ens.estimate("mass")
    mass_tree, _ = tree_ens.estimate("mass")
    return ProfileLaws(
        grid=grid,
        mean_map=mean_map,
        mean_tree=mean_tree,
        mean_localtime=mean_lt,
        sup_map_vs_tree=float(np.max(np.abs(mean_map - mean_tree))),
        ess={"map": map_ens.ess(), "tree": tree_ens.ess()},
        mass_map=float(mass_map),
        mass_tree=float(mass_tree),
    )


# -- the local-time / area identity ---------------------------------------------------


@dataclass
class JeulinResult:
    ks: float
    law_sq: EmpiricalLaw
    law_area: EmpiricalLaw
    mean_sq: float
    mean_area: float
    se_diff: float


def jeulin_check(n: int, reps: int, rng: RngStream) -> JeulinResult:
    """Squared-level-occupancy law against twice the area law on uniform excursions."""
    if n < 10:
        raise ValueError("identity check needs n >= 10")
    ens = tilted_ensemble(
        n, 0, "bf", reps, rng,
        {"sq": lambda smp: sq_localtime_functional(smp.exc).scaled,
         "area2": lambda smp: area_functional(smp.exc).scaled},
    )
    law_sq = EmpiricalLaw.from_ensemble(ens, "sq")
    law_area = EmpiricalLaw.from_ensemble(ens, "area2")
    diff = ens.columns["sq"] - ens.columns["area2"]
    return JeulinResult(
        ks=ks_distance(law_sq, law_area),
        law_sq=law_sq,
        law_area=law_area,
        mean_sq=law_sq.mean(),
        mean_area=law_area.mean(),
        se_diff=float(np.std(diff, ddof=1) / sqrt(reps)),
    )


# -- decoration-count gap -----------------------------------------------------------


@dataclass
class GapEstimate:
    n: int
    mean: float
    se: float


def decoration_gap_estimates(n_list, s: int, reps: int, rng: RngStream,
                             mode: str = "bf") -> list[GapEstimate]:
    """Monte Carlo means of the scaled exact decoration-count gap per size.

    The gap ``s! * #decorations - (pair count)^s`` is computed exactly per
    sampled tree and scaled by ``(2n)^{-3s/2}``; it vanishes identically for
    ``s = 1`` and shrinks like ``n^{-1/2}`` for ``s = 2``.
    """
    out = []
    for k, n in enumerate(n_list):
        scale = (2.0 * n) ** (-1.5 * s)
        vals = np.empty(reps)
        for r in range(reps):
            gen = rng.substream(k, r).generator()
            exc = sample_uniform_excursion(n, gen)
            vals[r] = decoration_count_gap(exc, s, mode) * scale
        out.append(GapEstimate(n, float(vals.mean()), float(vals.std(ddof=1) / sqrt(reps))
                               if reps > 1 else 0.0))
    return out


# -- growth-constant recursion and count asymptotics -----------------------------------


def wright_sequence(s_max: int, omega1: float = 1.0) -> list[float]:
    """Growth coefficients by the quadratic convolution recursion.

    ``w[s] = sum_{k=1}^{s-1} w[k] w[s-k] + 2 (3s - 4) w[s-1]`` anchored at
    ``w[1] = omega1``.
    """
    if not 1 <= s_max <= WRIGHT_CAP:
        raise ValueError(f"s_max must be within 1..{WRIGHT_CAP}")
    w = [0.0, float(omega1)]
    for s in range(2, s_max + 1):
        w.append(sum(w[k] * w[s - k] for k in range(1, s)) + 2 * (3 * s - 4) * w[s - 1])
    return w[1:]


def exact_map_count(n: int, s: int) -> int:
    """Exact number of rooted degree-one-root maps by summing decoration counts."""
    total = 0
    for f in enumerate_excursions(n):
        total += decoration_count(f, s, "bf")
    return total


def surplus_one_ratios(n_max: int = 12) -> dict[int, float]:
    """Exact ratios ``2 * #maps(n, 1) / 4^n`` that approach the first growth constant."""
    return {n: 2.0 * exact_map_count(n, 1) / 4.0 ** n for n in range(1, n_max + 1)}


def omega1_anchor(n_max: int = 12, fit_from: int = 8) -> tuple[dict[int, float], float]:
    """Extrapolate the surplus-one ratio to its limit via a linear fit in n^{-1/2}."""
    ratios = surplus_one_ratios(n_max)
    ns = [n for n in ratios if n >= fit_from]
    x = np.array([n ** -0.5 for n in ns])
    y = np.array([ratios[n] for n in ns])
    slope, intercept = np.polyfit(x, y, 1)
    return ratios, float(intercept)


def excursion_mean_area_power(s: int, omega1: float = 1.0) -> float:
    """Moments of the excursion area implied by the growth coefficients."""
    if s == 0:
        return 1.0
    w = wright_sequence(s, omega1)[-1]
    from math import factorial

    return w * factorial(s) * sqrt(pi) / (gamma((3 * s - 1) / 2.0) * 2.0 ** (3.5 * s - 2))


@dataclass
class CountTable:
    family: str
    n: int
    param: int
    exact: int | None
    prediction: float


def count_asymptotics(family: str, n: int, s_or_g: int, omega1: float = 1.0,
                      with_exact: bool = True) -> CountTable:
    """Exact count (where enumerable) next to its asymptotic prediction."""
    s = s_or_g
    if family == "f":
        pred = 4.0 ** (n - 1) / (sqrt(pi) * max(n - 1, 1) ** 1.5) if n >= 2 else 1.0
        exact = excursion_count(n) if with_exact else None
    elif family == "m":
        if s == 0:
            pred = 4.0 ** (n - 1) / (sqrt(pi) * max(n - 1, 1) ** 1.5) if n >= 2 else 1.0
            exact = excursion_count(n) if with_exact else None
        else:
            w = wright_sequence(s, omega1)[-1]
            pred = w * n ** (1.5 * (s - 1)) * 4.0 ** n / (2.0 ** s * gamma((3 * s - 1) / 2.0))
            exact = exact_map_count(n, s) if with_exact and n <= 12 and s <= 2 else None
    elif family == "h":
        mom = excursion_mean_area_power(s, omega1)
        from math import factorial

        pred = float(n) ** (n - 1 + 1.5 * s) * mom / factorial(s)
        if with_exact and n <= 6 and s <= 2:
            from .samplers import enumerate_surplus_graphs

            exact = len(enumerate_surplus_graphs(n, s))
        else:
            exact = None
    elif family == "um":
        g = s_or_g
        pred = (4.0 ** g / (3.0 ** g * gamma(g + 1) * sqrt(pi))) * n ** (3 * g - 1.5) * 4.0 ** n
        exact = None
    elif family == "umstar":
        g = s_or_g
        pred = (4.0 ** (g - 1) / (3.0 ** g * gamma(g + 1) * sqrt(pi))) * n ** (3 * g - 1.5) * 4.0 ** n
        exact = unicellular_star_count(n, g) if with_exact and n <= 5 and g == 1 else None
    else:
        raise ValueError(f"unknown family {family!r}")
    return CountTable(family, n, s_or_g, exact, pred)


# -- unicellular count identity ---------------------------------------------------------


def unicellular_star_count(n: int, g: int) -> int:
    """Brute count of unicellular surplus-2g maps whose exploration corners are distinct."""
    from .maps import bf_explore
    from .samplers import enumerate_maps

    count = 0
    for m in enumerate_maps(n, 2 * g):
        if not m.is_unicellular():
            continue
        _, xi = bf_explore(m)
        if len(set(xi.indices)) == len(xi.indices):
            count += 1
    return count


def um_count_identity(n: int, g: int = 1) -> tuple[int, int]:
    """Corner-tuple total over all excursions against the brute unicellular count."""
    from .maps import entangled_pairings, pairing_tuple_count

    if n > 5 or g != 1:
        raise ValueError("identity check capped at n <= 5, g = 1")
    pairings = entangled_pairings(g)
    lhs = 0
    for f in enumerate_excursions(n):
        lhs += sum(pairing_tuple_count(f, p) for p in pairings)
    rhs = unicellular_star_count(n, g)
    return lhs, rhs
