"""Structural risk minimisation baseline and a collection on which it fails.

SRM scores each hypothesis with the complexity and prior weight of the first
class that contains it. The block-cube collection below makes the correct
hypothesis live only in a class whose weight is too small for that score,
while the collection learner, which ignores weights, still finds it.

Points of the block-cube construction are numbered from 1 in the
descriptions and stored at index ``point - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .concepts import (
    ConceptClass,
    ExplicitClass,
    FiniteDistribution,
    LabeledSample,
    Predictor,
    as_points,
    vc_of_restriction,
)
from .errors import InputError, ResourceError
from .growth import Collection

CUBE_CAP = 22


def block(n):
    """0-based indices of block n, i.e. points n(n-1)+1 .. n^2."""
    return range(n * (n - 1), n * n)


def zero_block(n):
    """0-based indices where the special hypothesis of class n is 0: points n^2+1 .. n^2+ceil(n/2)."""
    return range(n * n, n * n + (n + 1) // 2)


class BlockCubeClass(ConceptClass):
    """Every labelling of block n with 1 elsewhere, plus the hypothesis that is 0 exactly on the zero block."""

    is_total = True

    def __init__(self, n, domain_size, name=None):
        if n < 1:
            raise InputError("block index must be positive")
        need = n * n + (n + 1) // 2
        if domain_size < need:
            raise InputError(f"class {n} needs a domain of at least {need} points")
        self.n = n
        self.domain_size = domain_size
        self.name = name or f"H{n}"
        self.block = block(n)
        self.zeros = zero_block(n)

    def _restrict(self, U):
        U = list(U)
        inb = [j for j, p in enumerate(U) if p in self.block]
        if len(inb) > CUBE_CAP:
            raise ResourceError(f"cube on {len(inb)} block points exceeds cap {CUBE_CAP}")
        codes = np.arange(2 ** len(inb), dtype=np.int64)
        rows = np.ones((2 ** len(inb), len(U)), dtype=np.uint8)
        if inb:
            rows[:, inb] = (codes[:, None] >> np.arange(len(inb))) & 1
        star = np.array([[0 if p in self.zeros else 1 for p in U]], dtype=np.uint8)
        return np.vstack([rows, star])

    def vc_on(self, U):
        U = as_points(U, self.domain_size)
        t = sum(1 for p in U if p in self.block)
        if t:
            return t
        return int(any(p in self.zeros for p in U))

    def vc(self):
        return self.n

    def special(self) -> np.ndarray:
        h = np.ones(self.domain_size, dtype=np.uint8)
        h[list(self.zeros)] = 0
        return h

    def explicit(self) -> ExplicitClass:
        """All members as an explicit matrix (only for small n)."""
        if self.n > 12:
            raise ResourceError("explicit block cube too large")
        rows = np.ones((2 ** self.n, self.domain_size), dtype=np.uint8)
        codes = np.arange(2 ** self.n)
        rows[:, list(self.block)] = (codes[:, None] >> np.arange(self.n)) & 1
        return ExplicitClass(np.vstack([rows, self.special()[None]]), name=self.name)


@dataclass
class WeightedCollection:
    collection: Collection
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.collection):
            raise InputError("one weight per member required")
        if np.any(self.weights <= 0):
            raise InputError("weights must be positive")
        if self.weights.sum() > 1 + 1e-12:
            raise InputError(f"weights sum to {self.weights.sum()!r} > 1")


@dataclass(frozen=True)
class SrmRow:
    member: int
    class_name: str
    hypothesis: tuple
    emp_err: Fraction
    penalty: float
    score: float

    def order_key(self):
        return (self.score, self.member, self.hypothesis)


def srm_penalty(vc, weight, m, delta):
    return math.sqrt((vc + math.log(1 / weight) + math.log(1 / delta)) / m)


def _class_vc(cls):
    if hasattr(cls, "vc"):
        return cls.vc()
    return vc_of_restriction(cls, range(cls.domain_size))


def _explicit_rows(wc, S, delta):
    m = len(S)
    seen = set()
    rows = []
    for idx, (cls, w) in enumerate(zip(wc.collection, wc.weights)):
        if not isinstance(cls, ExplicitClass):
            raise InputError("explicit SRM needs explicit members")
        pen = srm_penalty(_class_vc(cls), w, m, delta)
        errs = np.count_nonzero(cls.hypotheses[:, S.points] != S.labels, axis=1)
        for h, e in zip(cls.hypotheses, errs.tolist()):
            key = h.tobytes()
            if key in seen:
                continue
            seen.add(key)
            err = Fraction(e, m)
            rows.append(SrmRow(idx, cls.name, tuple(h.tolist()), err, pen, float(err) + pen))
    return rows


def _blockcube_rows(wc, S, delta):
    """Best hypothesis per class among those first appearing in that class.

    The all-ones function belongs to every class, so it is charged to the first.
    """
    m = len(S)
    U = S.domain()
    n0, n1 = S.label_counts(U)
    cnt = {p: (a, b) for p, a, b in zip(U, n0.tolist(), n1.tolist())}
    ones_err = sum(a for a, _ in cnt.values())
    rows = []
    for idx, (cls, w) in enumerate(zip(wc.collection, wc.weights)):
        pen = srm_penalty(cls.vc(), w, m, delta)
        # best cube member: 0 on block points where that helps (ties to 0)
        zeros = []
        err = ones_err
        for p in cls.block:
            a, b = cnt.get(p, (0, 0))
            if b <= a and (a or b):
                zeros.append(p)
                err += b - a
        if idx > 0 and not zeros:
            # must differ from all-ones somewhere on the block; cheapest flip, earliest first
            costs = [(cnt.get(p, (0, 0))[1] - cnt.get(p, (0, 0))[0], p) for p in cls.block]
            c, p = min(costs)
            zeros = [p]
            err += c
        rows.append(SrmRow(idx, cls.name, ("cube", cls.n, tuple(zeros)), Fraction(err, m), pen, err / m + pen))
        special_err = sum(cnt.get(p, (0, 0))[1] for p in cls.zeros) - sum(cnt.get(p, (0, 0))[0] for p in cls.zeros) + ones_err
        rows.append(SrmRow(idx, cls.name, ("special", cls.n), Fraction(special_err, m), pen, special_err / m + pen))
    return rows


def _hypothesis_predictor(wc, row: SrmRow, N):
    h = row.hypothesis
    if h and h[0] == "cube":
        zeros = set(h[2])
        return Predictor(N, fn=lambda pts: np.array([0 if p in zeros else 1 for p in pts.tolist()]),
                         provenance={"class": row.class_name, "hypothesis": h})
    if h and h[0] == "special":
        zs = wc.collection[row.member].zeros
        return Predictor(N, fn=lambda pts: np.array([0 if p in zs else 1 for p in pts.tolist()]),
                         provenance={"class": row.class_name, "hypothesis": h})
    return Predictor.from_labels(np.array(h, dtype=np.uint8), provenance={"class": row.class_name})


def srm_learn(wc: WeightedCollection, S: LabeledSample, delta):
    """Minimise err(h, S) + sqrt((vc + ln 1/w + ln 1/delta) / m), charging h to its first class."""
    if len(S) == 0:
        raise InputError("SRM needs a nonempty sample")
    S.check_domain(wc.collection.domain_size)
    if all(isinstance(c, BlockCubeClass) for c in wc.collection):
        rows = _blockcube_rows(wc, S, delta)
    else:
        rows = _explicit_rows(wc, S, delta)
    best = min(range(len(rows)), key=lambda i: rows[i].order_key())
    return _hypothesis_predictor(wc, rows[best], wc.collection.domain_size), rows, best


def power_weights(n):
    return 2.0 ** -n


@dataclass
class AdversarialInstance:
    weighted: WeightedCollection
    D: FiniteDistribution
    m0: int
    w0: int
    domain_size: int
    support: tuple

    @property
    def collection(self):
        return self.weighted.collection


def threshold_w0(m, delta, ln_inv_w1, C1=1.0, C2=1.0) -> int:
    """Smallest integer w0 with sqrt(w0/m) above the SRM score of the all-ones hypothesis gap."""
    rhs = 0.5 + C1 * math.sqrt(math.log(1 / delta) / m) + C2 * math.sqrt((ln_inv_w1 + math.log(1 / delta)) / m)
    w0 = max(0, math.floor(m * rhs * rhs) - 1)
    while not math.sqrt(w0 / m) > rhs:
        w0 += 1
    return w0


def adversarial_instance(m, delta, weight_rule: Callable[[int], float] = power_weights, N_trunc=None,
                         C1=1.0, C2=1.0, support="literal") -> AdversarialInstance:
    """Block-cube collection H_1..H_{m0+1}, weights w(n), and D labelled by the special member of H_{m0}.

    ``support="literal"`` puts D uniformly on points m0^2+1 .. m0^2+m0+1;
    ``support="pair"`` drops the last of these, which lies in block m0+1.
    """
    ln_inv = lambda n: -math.log(weight_rule(n))
    w0 = threshold_w0(m, delta, ln_inv(1), C1, C2)
    m0 = 1
    while ln_inv(m0) < w0:
        m0 += 1
        if m0 > 10 ** 6:
            raise InputError("weight rule never drops below exp(-w0)")
    need = (m0 + 1) ** 2 + m0 + 1
    N = need if N_trunc is None else int(N_trunc)
    if N < need:
        raise InputError(f"N_trunc={N} too small; the construction needs {need} points")
    members = [BlockCubeClass(n, N) for n in range(1, m0 + 2)]
    weights = [weight_rule(n) for n in range(1, m0 + 2)]
    col = Collection(members, name=f"blockcube(m={m})")
    if support == "literal":
        pts = list(range(m0 * m0, m0 * m0 + m0 + 1))
    elif support == "pair":
        pts = list(range(m0 * m0, m0 * m0 + m0))
    else:
        raise InputError(f"unknown support option {support!r}")
    h = members[m0 - 1].special()
    D = FiniteDistribution.uniform_labelled(pts, h[pts].tolist())
    return AdversarialInstance(WeightedCollection(col, weights), D, m0, w0, N, tuple(pts))
