"""Turning a base class plus prior knowledge into a collection of partial classes.

Covers clustering constraints (one class per level of a hierarchy), forbidden
behaviours graded by a penalty and thresholded at r, the similarity,
nearest-neighbour and contrastive instances of that scheme, the margin
translation of real-valued classes, and the matching dimensions and nets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable

import numpy as np

from .concepts import (
    STAR,
    ConceptClass,
    Domain,
    ExplicitClass,
    LabeledSample,
    _apriori_largest,
    as_points,
    default_vc_cap,
)
from .errors import InputError, ResourceError
from .growth import Collection

LIP_TOL = 1e-12
OPPOSITE = frozenset({(0, 1), (1, 0)})
CONTRASTIVE = frozenset({(0, 1, 0), (1, 0, 1)})


@dataclass(eq=False)
class ForbiddenSpec:
    """Forbidden label patterns on k-tuples, graded by a penalty.

    ``forbidden(t)`` returns the patterns disallowed on tuple ``t`` (empty
    means the tuple imposes nothing); ``penalty(t)`` its real grade. With
    ``ordered=False`` tuples are increasing k-subsets, otherwise ordered
    k-tuples of distinct points.
    """

    k: int
    forbidden: Callable[[tuple], frozenset]
    penalty: Callable[[tuple], float]
    ordered: bool = False
    name: str = "spec"
    pair_penalty: np.ndarray | None = None

    def tuples(self, U):
        U = as_points(U)
        gen = permutations(U, self.k) if self.ordered else combinations(U, self.k)
        return [t for t in gen if self.forbidden(t)]

    def scored_tuples(self, U):
        """``(tuple, penalty)`` for every tuple in U that carries a constraint (memoised)."""
        U = as_points(U)
        cache = self.__dict__.setdefault("_scored", {})
        hit = cache.get(U)
        if hit is None:
            if len(cache) > 20_000:
                cache.clear()
            if self.pair_penalty is not None and self.k == 2 and not self.ordered:
                hit = [((a, b), float(self.pair_penalty[a, b])) for a, b in combinations(U, 2)]
            else:
                hit = [(t, float(self.penalty(t))) for t in self.tuples(U)]
            cache[U] = hit
        return hit


class ClusterConstraint:
    """Points sharing a cluster id must share a label."""

    def __init__(self, labels, name="clusters"):
        self.labels = np.asarray(labels, dtype=np.int64)
        self.name = name

    def key(self, U):
        seen = {}
        return ("clusters", tuple(seen.setdefault(int(c), len(seen)) for c in self.labels[list(U)]))

    def filter(self, U, rows):
        if rows.shape[0] == 0 or len(U) < 2:
            return rows
        ids = self.labels[list(U)]
        keep = np.ones(rows.shape[0], dtype=bool)
        for c in np.unique(ids):
            cols = np.flatnonzero(ids == c)
            if len(cols) > 1:
                keep &= np.all(rows[:, cols] == rows[:, cols[:1]], axis=1)
        return rows[keep]


class ForbiddenConstraint:
    """Tuples inside U with penalty >= r (or > r when ``strict``) may not show a forbidden pattern."""

    def __init__(self, spec: ForbiddenSpec, r: float, strict=False):
        self.spec = spec
        self.r = float(r)
        self.strict = strict

    def is_active(self, p):
        return p > self.r if self.strict else p >= self.r

    def active(self, U):
        return tuple(t for t, p in self.spec.scored_tuples(U) if self.is_active(p))

    def key(self, U):
        return ("forbidden", id(self.spec), self.active(U))

    def filter(self, U, rows):
        if rows.shape[0] == 0:
            return rows
        pos = {p: j for j, p in enumerate(U)}
        keep = np.ones(rows.shape[0], dtype=bool)
        shifts = np.arange(self.spec.k)
        for t in self.active(U):
            cols = [pos[p] for p in t]
            codes = (rows[:, cols].astype(np.int64) << shifts).sum(1)
            bad = [sum(b << i for i, b in enumerate(pat)) for pat in self.spec.forbidden(t)]
            keep &= ~np.isin(codes, bad)
        return rows[keep]


class IntensionalClass(ConceptClass):
    """A base class whose behaviours on U are filtered by a constraint evaluated inside U only.

    The constraint makes the class partial: a behaviour allowed on T need not
    extend to a behaviour allowed on a superset of T.
    """

    def __init__(self, base: ConceptClass, constraint=None, name=None):
        self.base = base
        self.constraint = constraint
        self.domain_size = base.domain_size
        self.is_total = base.is_total and constraint is None
        self.name = name or base.name

    def _restrict(self, U):
        rows = self.base.restrict(U)
        if self.constraint is None:
            return rows
        return self.constraint.filter(U, rows)

    def trace_key(self, U):
        U = as_points(U, self.domain_size)
        if self.constraint is None:
            return ("base", id(self.base))
        return ("constrained", id(self.base)) + self.constraint.key(U)


def restrict_intensional(ic: IntensionalClass, U):
    return ic.restrict(U)


class HierarchicalClustering:
    """A refinement chain of partitions from the root (one cluster) down to singletons.

    ``levels[i]`` holds a cluster id per point; level 0 is the root.
    """

    def __init__(self, levels):
        levels = [np.asarray(lv, dtype=np.int64) for lv in levels]
        if not levels:
            raise InputError("a hierarchy needs at least one level")
        n = len(levels[0])
        if any(len(lv) != n for lv in levels):
            raise InputError("all levels must label every point")
        if len(np.unique(levels[0])) != 1:
            raise InputError("level 0 must be a single cluster")
        if len(np.unique(levels[-1])) != n:
            raise InputError("the last level must consist of singletons")
        for i in range(1, len(levels)):
            # each finer cluster must sit inside one coarser cluster
            for c in np.unique(levels[i]):
                if len(np.unique(levels[i - 1][levels[i] == c])) != 1:
                    raise InputError(f"level {i} does not refine level {i - 1}")
        self.levels = levels
        self.domain_size = n

    def __len__(self):
        return len(self.levels)

    @classmethod
    def from_linkage(cls, Z):
        """Levels from a scipy linkage matrix: every merge adds one level."""
        from scipy.cluster.hierarchy import cut_tree

        cuts = cut_tree(np.asarray(Z, dtype=float))
        return cls([cuts[:, j] for j in range(cuts.shape[1] - 1, -1, -1)])

    @classmethod
    def from_points(cls, coords, method="average"):
        from scipy.cluster.hierarchy import linkage

        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        return cls.from_linkage(linkage(coords, method=method))

    @classmethod
    def from_merges(cls, n, merges):
        """Agglomerate singletons by merging pairs of current clusters (given by member points)."""
        labels = np.arange(n)
        levels = [labels.copy()]
        for a, b in merges:
            la, lb = labels[a], labels[b]
            if la == lb:
                raise InputError(f"points {a} and {b} are already in one cluster")
            labels = np.where(labels == lb, la, labels)
            levels.append(labels.copy())
        return cls(levels[::-1])

    @classmethod
    def random(cls, n, rng):
        merges = []
        labels = list(range(n))
        while len(set(labels)) > 1:
            ids = sorted(set(labels))
            a, b = rng.choice(len(ids), size=2, replace=False)
            pa = labels.index(ids[a])
            pb = labels.index(ids[b])
            merges.append((pa, pb))
            labels = [ids[a] if v == ids[b] else v for v in labels]
        return cls.from_merges(n, merges)

    @classmethod
    def load(cls, path):
        """Lines ``level cluster_id p1 p2 ...``; every level must cover the domain."""
        rows = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                try:
                    nums = [int(v) for v in parts]
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: expected integers") from exc
                if len(nums) < 3:
                    raise InputError(f"{path}:{lineno}: expected level, cluster id and members")
                rows.append((lineno, nums[0], nums[1], nums[2:]))
        if not rows:
            raise InputError(f"{path}: no clusters")
        n = 1 + max(p for _, _, _, pts in rows for p in pts)
        depth = 1 + max(lv for _, lv, _, _ in rows)
        levels = np.full((depth, n), -1, dtype=np.int64)
        for lineno, lv, cid, pts in rows:
            if np.any(levels[lv, pts] >= 0):
                raise InputError(f"{path}:{lineno}: point assigned twice on level {lv}")
            levels[lv, pts] = cid
        if np.any(levels < 0):
            raise InputError(f"{path}: some level does not cover every point")
        return cls(list(levels))

    def save(self, path):
        with open(path, "w") as fh:
            for i, lv in enumerate(self.levels):
                for c in np.unique(lv):
                    members = " ".join(str(p) for p in np.flatnonzero(lv == c))
                    fh.write(f"{i} {c} {members}\n")


def hc_collection(base: ConceptClass, hc: HierarchicalClustering) -> Collection:
    if hc.domain_size != base.domain_size:
        raise InputError("hierarchy and base class cover different domains")
    members = [
        IntensionalClass(base, ClusterConstraint(lv, name=f"level{i}"), name=f"{base.name}@level{i}")
        for i, lv in enumerate(hc.levels)
    ]
    return Collection(members, name=f"hc({base.name})", tau_bound=lambda m: max(1, m))


def penalty_breakpoints(spec: ForbiddenSpec, U):
    """Sorted distinct penalties over constrained tuples in U, and their multiplicities."""
    vals = [p for _, p in spec.scored_tuples(U)]
    if not vals:
        return (), ()
    uniq, counts = np.unique(np.array(vals, dtype=float), return_counts=True)
    return tuple(uniq.tolist()), tuple(counts.tolist())


def breakpoint_representatives(breaks, strict=False):
    """One threshold per interval of r on which the active tuple set is constant.

    With non-strict activation (p >= r) the intervals are (-inf, p1],
    (p1, p2], ..., (pl, inf); with strict activation (p > r) they are
    (-inf, p1), [p1, p2), ..., [pl, inf). Midpoints of interior intervals are
    used, plus p1 - 1 and pl + 1; an infinite breakpoint only contributes the
    interval below it.
    """
    if not breaks:
        return (0.0,)
    finite = [p for p in breaks if math.isfinite(p)]
    reps = []
    reps.append(finite[0] - 1.0 if finite else 0.0)
    for a, b in zip(breaks, breaks[1:]):
        if not math.isfinite(a):
            break
        if strict:
            reps.append(a if not math.isfinite(b) else (a + b) / 2)
        else:
            reps.append(a + 1.0 if not math.isfinite(b) else (a + b) / 2)
    if math.isfinite(breaks[-1]):
        reps.append(breaks[-1] if strict else breaks[-1] + 1.0)
    return tuple(reps)


def forbidden_class(base, spec: ForbiddenSpec, r, strict=False, name=None):
    return IntensionalClass(base, ForbiddenConstraint(spec, r, strict), name=name or f"{base.name}|{spec.name}>={r!r}")


def forbidden_collection(base, spec: ForbiddenSpec, U, strict=False) -> Collection:
    """Representative classes H(r), one per penalty interval determined by U."""
    breaks, _ = penalty_breakpoints(spec, U)
    members = [forbidden_class(base, spec, r, strict, name=f"{base.name}|{spec.name}@{r!r}") for r in breakpoint_representatives(breaks, strict)]
    k = spec.k
    return Collection(members, name=f"forbidden({base.name},{spec.name})", tau_bound=lambda m: math.comb(m, k) + 1)


def pair_spec(matrix, name) -> ForbiddenSpec:
    matrix = np.asarray(matrix, dtype=float)
    return ForbiddenSpec(
        k=2,
        forbidden=lambda t: OPPOSITE,
        penalty=lambda t: float(matrix[t[0], t[1]]),
        name=name,
        pair_penalty=matrix,
    )


def similarity_spec(domain: Domain) -> ForbiddenSpec:
    if domain.weights is None:
        raise InputError("similarity constraints require domain weights")
    return pair_spec(domain.weights, "similarity")


def nn_spec(domain: Domain) -> ForbiddenSpec:
    """Opposite labels forbidden with penalty 1/distance (infinite at distance 0)."""
    if domain.metric is None:
        raise InputError("nearest-neighbour constraints require a metric")
    with np.errstate(divide="ignore"):
        inv = np.where(domain.metric > 0, 1.0 / np.where(domain.metric > 0, domain.metric, 1.0), np.inf)
    return pair_spec(inv, "nn")


def ball_radius(metric, pts):
    """Smallest radius of a closed ball centred at a domain point containing ``pts``."""
    return float(np.asarray(metric)[:, list(pts)].max(1).min())


def contrastive_spec(domain: Domain) -> ForbiddenSpec:
    """Ordered triplets (x, x+, x-) with d(x, x+) < d(x, x-) forbid (0,1,0) and (1,0,1).

    The penalty is one over the smallest radius of a domain-centred ball holding all three points.
    """
    if domain.metric is None:
        raise InputError("contrastive constraints require a metric")
    metric = domain.metric

    def forbidden(t):
        x, xp, xn = t
        return CONTRASTIVE if metric[x, xp] < metric[x, xn] else frozenset()

    def penalty(t):
        rad = ball_radius(metric, t)
        return math.inf if rad == 0 else 1.0 / rad

    return ForbiddenSpec(k=3, forbidden=forbidden, penalty=penalty, ordered=True, name="contrastive")


def _vc_admissible(base: ConceptClass, points, admissible, cap):
    cap = default_vc_cap() if cap is None else cap

    def ok(T):
        return admissible(T) and base.restrict(T).shape[0] == 2 ** len(T)

    return _apriori_largest(list(points), ok, cap)


def vc_at_weight(base, domain: Domain, r, U=None, cap=None) -> int:
    """Largest set shattered by ``base`` whose pairwise weights are all below r."""
    if domain.weights is None:
        raise InputError("vc_at_weight requires domain weights")
    W = domain.weights
    pts = range(domain.size) if U is None else as_points(U)
    return _vc_admissible(base, pts, lambda T: all(W[a, b] < r for a, b in combinations(T, 2)), cap)


def vc_at_distance(base, domain: Domain, r, U=None, cap=None) -> int:
    """Largest set shattered by ``base`` whose pairwise distances all exceed r."""
    if domain.metric is None:
        raise InputError("vc_at_distance requires a metric")
    M = domain.metric
    pts = range(domain.size) if U is None else as_points(U)
    return _vc_admissible(base, pts, lambda T: all(M[a, b] > r for a, b in combinations(T, 2)), cap)


def vc_at_radius(base, domain: Domain, r, U=None, cap=None) -> int:
    """Largest set shattered by ``base`` with at most two members in any closed r-ball at a domain point."""
    if domain.metric is None:
        raise InputError("vc_at_radius requires a metric")
    inball = domain.metric <= r
    pts = range(domain.size) if U is None else as_points(U)
    return _vc_admissible(base, pts, lambda T: int(inball[:, list(T)].sum(1).max()) <= 2, cap)


def r_net(domain: Domain, r) -> tuple:
    """Greedy farthest-point selection from point 0 until every point is within r.

    The result covers the space at radius r and its points are pairwise more than r apart.
    """
    if domain.metric is None:
        raise InputError("r_net requires a metric")
    M = domain.metric
    net = [0]
    dist = M[0].copy()
    while dist.max() > r:
        far = int(np.argmax(dist))
        net.append(far)
        dist = np.minimum(dist, M[far])
    return tuple(sorted(net))


def r_packing(domain: Domain, r) -> tuple:
    return r_net(domain, r)


@dataclass
class RealValuedClass:
    """A finite set of real-valued functions on the domain, one per row."""

    functions: np.ndarray
    name: str = "F"

    def __post_init__(self):
        self.functions = np.atleast_2d(np.asarray(self.functions, dtype=float))

    @property
    def domain_size(self):
        return self.functions.shape[1]

    def lipschitz(self, L, metric) -> "RealValuedClass":
        """Members with |f(x) - f(z)| <= L * d(x, z) on every pair."""
        metric = np.asarray(metric, dtype=float)
        F = self.functions
        diff = np.abs(F[:, :, None] - F[:, None, :])
        ok = np.all(diff <= L * metric[None] + LIP_TOL, axis=(1, 2))
        return RealValuedClass(F[ok], name=f"{self.name}({L!r})")

    @classmethod
    def load(cls, path, name=None):
        F = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(F, name=name or "F")

    def save(self, path):
        with open(path, "w") as fh:
            for row in self.functions:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def sign01(values):
    return (np.asarray(values) >= 0).astype(np.uint8)


def margin_class(F: RealValuedClass, L, gamma, metric) -> ExplicitClass:
    """Partial margin behaviours of F(L): the sign where |f| >= gamma, STAR elsewhere."""
    FL = F.lipschitz(L, metric).functions
    H = np.where(np.abs(FL) >= gamma, sign01(FL), STAR).astype(np.uint8)
    return ExplicitClass(H.reshape(-1, F.domain_size), name=f"margin({F.name},{L!r},{gamma!r})", allow_empty=True)


def margin_translate(F: RealValuedClass, L, gamma, U, metric):
    return margin_class(F, L, gamma, metric).restrict(U)


def translated_class(F: RealValuedClass, L, gamma, domain: Domain) -> IntensionalClass:
    """Signs of F with opposite labels forbidden on pairs closer than 2*gamma/L."""
    base = ExplicitClass(sign01(F.functions), name=f"sign({F.name})")
    return IntensionalClass(
        base,
        ForbiddenConstraint(nn_spec(domain), L / (2 * gamma), strict=True),
        name=f"{F.name}01({L!r}/2*{gamma!r})",
    )


def err_gamma(f, S: LabeledSample, gamma):
    """Fraction of pairs with y*f(x) < gamma, labels mapped to -1/+1."""
    from fractions import Fraction

    if len(S) == 0:
        raise InputError("error on an empty sample is undefined")
    y = 2 * S.labels.astype(float) - 1
    return Fraction(int(np.count_nonzero(y * np.asarray(f, dtype=float)[S.points] < gamma)), len(S))


def err_gamma_class(F: RealValuedClass, S: LabeledSample, gamma):
    return min(err_gamma(f, S, gamma) for f in F.functions)


def fat_shattering_zero_witness(F: RealValuedClass, gamma, U=None, cap=None) -> int:
    """Largest set on which every sign pattern b has some f with b(x) f(x) >= gamma throughout."""
    if gamma <= 0:
        raise InputError("margin must be positive")
    cap = default_vc_cap() if cap is None else cap
    Fm = F.functions
    pts = range(F.domain_size) if U is None else as_points(U)

    def shattered(T):
        sub = Fm[:, list(T)]
        ok = np.all(np.abs(sub) >= gamma, axis=1)
        pats = np.unique(sign01(sub[ok]), axis=0)
        return pats.shape[0] == 2 ** len(T)

    return _apriori_largest(list(pts), shattered, cap)


def lipschitz_grid(domain: Domain, L, levels) -> RealValuedClass:
    """Every L-Lipschitz function on the domain with values in ``levels`` (exhaustive)."""
    levels = np.asarray(sorted(levels), dtype=float)
    n = domain.size
    if len(levels) ** n > 2_000_000:
        raise ResourceError(f"grid of {len(levels)}^{n} functions exceeds the enumeration cap")
    M = domain.metric
    funcs = [np.zeros(0)]
    for x in range(n):
        nxt = []
        for f in funcs:
            for v in levels:
                if all(abs(v - f[z]) <= L * M[x, z] + LIP_TOL for z in range(x)):
                    nxt.append(np.append(f, v))
        funcs = nxt
    return RealValuedClass(np.array(funcs).reshape(-1, n), name=f"lip{L!r}")
