"""Equivalence of classes on a point set and the growth parameter of a collection.

Two classes are equivalent on U when their total behaviours agree on every
subset of U. For total classes agreement on U itself is enough, since the
behaviours on a subset are projections. For partial classes it is not, and
the full signature over all 2^|U| subsets is compared.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .concepts import (
    ConceptClass,
    ExplicitClass,
    FiniteDistribution,
    as_points,
    default_tau_cap,
    default_trials,
    empirical_quantile,
    make_rng,
)
from .errors import InputError, ResourceError

EXACT_SUBSET_LIMIT = 50_000


class Collection:
    """Ordered, nonempty list of classes over one domain, with optional analytic growth bound."""

    def __init__(self, members: Sequence[ConceptClass], name="collection", tau_bound: Callable[[int], int] | None = None):
        members = list(members)
        if not members:
            raise InputError("a collection needs at least one member")
        names = [c.name for c in members]
        if len(set(names)) != len(names):
            raise InputError("member names must be unique")
        if len({c.domain_size for c in members}) != 1:
            raise InputError("all members must share one domain")
        self.members = members
        self.name = name
        self.tau_bound = tau_bound

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def domain_size(self):
        return self.members[0].domain_size

    def names(self):
        return [c.name for c in self.members]


def _subset_masks(n):
    return range(2 ** n)


def equivalence_signature(cls: ConceptClass, U, cap=None) -> dict:
    """Map each subset T of U (as a sorted tuple) to its sorted list of behaviours."""
    cap = default_tau_cap() if cap is None else cap
    U = as_points(U, cls.domain_size)
    if len(U) > cap:
        raise ResourceError(f"signature over {len(U)} points exceeds cap {cap}")
    sig = {}
    for mask in _subset_masks(len(U)):
        T = tuple(U[j] for j in range(len(U)) if mask >> j & 1)
        sig[T] = ["".join(map(str, r)) for r in cls.restrict(T).tolist()]
    return sig


def _full_signature_equal(A, B, U):
    for mask in _subset_masks(len(U)):
        T = tuple(U[j] for j in range(len(U)) if mask >> j & 1)
        if not np.array_equal(A.restrict(T), B.restrict(T)):
            return False
    return True


def equivalent_on(A: ConceptClass, B: ConceptClass, U, cap=None, mode="exact") -> bool:
    """Whether A and B have equal restrictions on every subset of U.

    ``mode="upper"`` treats pairs that would need a signature above the cap as
    different, which can only overcount equivalence classes.
    """
    cap = default_tau_cap() if cap is None else cap
    U = as_points(U, A.domain_size)
    if A is B:
        return True
    if not np.array_equal(A.restrict(U), B.restrict(U)):
        return False
    if A.is_total and B.is_total:
        return True
    if A.trace_key(U) == B.trace_key(U):
        return True
    if len(U) > cap:
        if mode == "upper":
            return False
        raise ResourceError(f"exact equivalence over {len(U)} points exceeds cap {cap}; use mode='upper'")
    return _full_signature_equal(A, B, U)


def equivalence_partition(collection, U, cap=None, mode="exact") -> list:
    """Class id per member; ids are numbered by first appearance in member order."""
    U = as_points(U, collection.domain_size)
    reps = []
    buckets = {}
    ids = []
    for c in collection:
        rows = c.restrict(U)
        key = (rows.shape, rows.tobytes())
        found = None
        for cid in buckets.get(key, []):
            if equivalent_on(reps[cid], c, U, cap=cap, mode=mode):
                found = cid
                break
        if found is None:
            found = len(reps)
            reps.append(c)
            buckets.setdefault(key, []).append(found)
        ids.append(found)
    return ids


def tau_of_set(collection, U, cap=None, mode="exact") -> int:
    return max(equivalence_partition(collection, U, cap=cap, mode=mode)) + 1


def write_partition_csv(collection, U, path, cap=None, mode="exact"):
    ids = equivalence_partition(collection, U, cap=cap, mode=mode)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["member_name", "class_id"])
        for c, cid in zip(collection, ids):
            w.writerow([c.name, cid])


@dataclass(frozen=True)
class TauEstimate:
    value: int
    mode: str
    witness: tuple
    evaluated: int


def tau_of_m(collection, m, mode="exact", trials=200, rng=None, cap=None, points=None) -> TauEstimate:
    """Largest number of equivalence classes over size-m point sets.

    ``mode="exact"`` enumerates every subset; ``mode="sampled"`` returns a
    lower bound from random subsets (certified by its witness set).
    """
    pts = tuple(range(collection.domain_size)) if points is None else as_points(points)
    if not 0 <= m <= len(pts):
        raise InputError(f"m={m} outside 0..{len(pts)}")
    if mode == "exact":
        total = math.comb(len(pts), m)
        if total > EXACT_SUBSET_LIMIT:
            raise ResourceError(f"exact mode would enumerate {total} subsets; use mode='sampled'")
        subsets = combinations(pts, m)
    elif mode == "sampled":
        gen = make_rng(rng)
        subsets = (tuple(sorted(gen.choice(pts, size=m, replace=False).tolist())) for _ in range(trials))
        total = trials
    else:
        raise InputError(f"unknown tau mode {mode!r}")
    best, witness = 0, ()
    for U in subsets:
        t = tau_of_set(collection, U, cap=cap)
        if t > best:
            best, witness = t, tuple(U)
    return TauEstimate(best, mode, witness, total)


def tau_dist_estimate(collection, D: FiniteDistribution, m, delta, trials=None, rng=None, cap=None, mode="exact") -> int:
    """Empirical (1 - delta)-quantile of tau over dom(S), S ~ D^m."""
    gen = make_rng(rng)
    trials = default_trials(delta) if trials is None else trials
    vals = [tau_of_set(collection, D.sample(m, gen).domain(), cap=cap, mode=mode) for _ in range(trials)]
    return empirical_quantile(vals, delta)


def growth_function_pi(cls: ConceptClass, U, cap=None) -> int:
    cap = max(default_tau_cap(), 20) if cap is None else cap
    U = as_points(U, cls.domain_size)
    if len(U) > cap:
        raise ResourceError(f"growth function over {len(U)} points exceeds cap {cap}")
    return int(cls.restrict(U).shape[0])


def cube_on(m, A) -> np.ndarray:
    """The 2^|A| functions on m points that shatter A and are 1 elsewhere, in binary order of A."""
    A = list(A)
    rows = np.ones((2 ** len(A), m), dtype=np.uint8)
    for j in range(2 ** len(A)):
        for i, a in enumerate(A):
            rows[j, a] = j >> i & 1
    return rows


def exponential_example(m=8, k=3, sets=None) -> Collection:
    """Classes formed by every sub-family of a k-dimensional cube, over the chosen k-sets.

    With ``sets`` a single k-set this gives 2^(2^k) classes whose behaviours on
    the whole domain are pairwise different; with 2^k = m that is 2^m.
    """
    sets = list(combinations(range(m), k)) if sets is None else [tuple(s) for s in sets]
    members = []
    for A in sets:
        cube = cube_on(m, A)
        for sigma in range(2 ** len(cube)):
            chosen = [j for j in range(len(cube)) if sigma >> j & 1]
            members.append(ExplicitClass(cube[chosen].reshape(-1, m), name=f"A{A}s{sigma}", allow_empty=True))
    return Collection(members, name=f"exp({m},{k})")


def union_class(collection) -> ExplicitClass:
    rows = [c.hypotheses for c in collection if len(c.hypotheses)]
    return ExplicitClass(np.vstack(rows), name=f"union({collection.name})")
