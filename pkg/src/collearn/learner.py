"""Compression-based learning from a collection of classes.

For each class the learner builds majority votes of one-inclusion-graph
predictors trained on small index blocks of the sample, scores every
(class, index sequence) pair by its sample error plus a penalty growing with
the sequence length and the growth parameter, and returns the minimiser.

Boosting uses a fixed reweighting factor of 2 on mistakes. When every round
has weighted error at most 1/3 the total weight grows by at most 4/3 per
round, while a point the unweighted majority gets wrong carries weight at
least 2^(T/2)/m. Both are compatible only while T < ln(m) / 0.0589, so after
ceil(18 ln m) + 1 rounds the majority is correct on every point.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .concepts import ConceptClass, LabeledSample, Predictor, as_points, default_vc_cap, vc_of_restriction
from .errors import BoostingError, InputError
from .growth import Collection, equivalence_partition
from .oig import oig_predict_many

WEAK_EDGE = Fraction(1, 3)
RANDOM_DRAWS = 200
EXHAUSTIVE_LIMIT = 100_000
RETRIES = 5
PAIR_BUDGET = 50_000


def boosting_rounds(m: int) -> int:
    return math.ceil(18 * math.log(m)) + 1 if m > 1 else 1


class PredictionCache:
    """OIG predictions keyed by class, training content and test point."""

    def __init__(self):
        self._store = {}

    @staticmethod
    def content(S: LabeledSample, idx) -> tuple:
        return tuple(sorted({(int(S.points[i]), int(S.labels[i])) for i in idx}))

    def predict(self, cls, content: tuple, xs) -> np.ndarray:
        table = self._store.setdefault((id(cls), content), {})
        uniq, inv = np.unique(np.asarray(xs, dtype=np.int64), return_inverse=True)
        todo = [x for x in uniq.tolist() if x not in table]
        if todo:
            train = LabeledSample.from_pairs(content)
            for x, v in zip(todo, oig_predict_many(cls, train, todo).tolist()):
                table[x] = v
        vals = np.fromiter((table[x] for x in uniq.tolist()), dtype=np.uint8, count=len(uniq))
        return vals[inv.reshape(-1)]


@dataclass(frozen=True)
class CompressionCandidate:
    """Index blocks S_1..S_T into the sample; the vote is a majority of one OIG per block."""

    class_name: str
    blocks: tuple
    k: int
    T: int
    source: str = ""

    @property
    def J(self) -> tuple:
        return tuple(i for b in self.blocks for i in b)

    def __len__(self):
        return len(self.J)

    def check(self, m):
        if any(not 0 <= i < m for i in self.J):
            raise InputError(f"candidate index out of range for a sample of size {m}")
        if len(self.J) > self.k * self.T:
            raise InputError("candidate uses more than k*T indices")


def _votes(cls, S, blocks, xs, cache):
    cache = cache or PredictionCache()
    return np.stack([cache.predict(cls, PredictionCache.content(S, b), xs) for b in blocks]) if blocks else None


def majority_predictions(cls, S: LabeledSample, blocks, xs, cache=None) -> np.ndarray:
    """Majority over blocks of OIG predictions; ties (and no blocks) go to 0."""
    xs = np.asarray(xs, dtype=np.int64).reshape(-1)
    if not blocks:
        blocks = ((),)
    votes = _votes(cls, S, blocks, xs, cache)
    return (2 * votes.sum(0, dtype=np.int64) > len(blocks)).astype(np.uint8)


def majority_vote(cls, S: LabeledSample, candidate: CompressionCandidate, x, cache=None) -> int:
    candidate.check(len(S))
    return int(majority_predictions(cls, S, candidate.blocks, [x], cache)[0])


@dataclass(frozen=True)
class WeakResult:
    success: bool
    R: tuple
    error: float
    tried: int


def _weighted_error(cls, S, idx, weights, cache):
    pred = cache.predict(cls, PredictionCache.content(S, idx), S.points)
    return float(weights[pred != S.labels].sum())


def weak_learner_search(cls, S: LabeledSample, weights, k, rng=None, cache=None,
                        draws=RANDOM_DRAWS, exhaustive_limit=EXHAUSTIVE_LIMIT) -> WeakResult:
    """Find R of at most k sample indices whose OIG has weighted error <= 1/3.

    Tries the empty set, then weighted random draws of size k, then every set
    of at most k distinct (point, label) pairs while that enumeration stays
    under ``exhaustive_limit``. Failure is returned, not raised.
    """
    from .concepts import make_rng

    weights = np.asarray(weights, dtype=float)
    if abs(weights.sum() - 1) > 1e-9 or np.any(weights < 0):
        raise InputError("weights must be a probability vector over the sample")
    cache = cache or PredictionCache()
    gen = make_rng(rng)
    limit = float(WEAK_EDGE) + 1e-12
    tried = 1
    err = _weighted_error(cls, S, (), weights, cache)
    if err <= limit:
        return WeakResult(True, (), err, tried)
    if k <= 0:
        return WeakResult(False, (), err, tried)
    for _ in range(draws):
        R = tuple(sorted(gen.choice(len(S), size=k, p=weights).tolist()))
        tried += 1
        err = _weighted_error(cls, S, R, weights, cache)
        if err <= limit:
            return WeakResult(True, R, err, tried)
    first = {}
    for i, pair in enumerate(zip(S.points.tolist(), S.labels.tolist())):
        first.setdefault(pair, i)
    reps = sorted(first.values())
    sizes = [r for r in range(1, min(k, len(reps)) + 1)]
    if sum(math.comb(len(reps), r) for r in sizes) <= exhaustive_limit:
        best = (math.inf, ())
        for r in sizes:
            for R in combinations(reps, r):
                tried += 1
                err = _weighted_error(cls, S, R, weights, cache)
                if err <= limit:
                    return WeakResult(True, R, err, tried)
                best = min(best, (err, R))
        return WeakResult(False, best[1], best[0], tried)
    return WeakResult(False, (), math.inf, tried)


def boost(cls, S_prime: LabeledSample, k, T_max=None, rng=None, cache=None, name=None) -> CompressionCandidate:
    """Reweight by 2 on mistakes until the unweighted majority is right on all of S_prime.

    Indices in the returned candidate refer to positions in ``S_prime``.
    """
    from .concepts import make_rng

    m = len(S_prime)
    if m == 0:
        raise BoostingError("cannot boost on an empty sample")
    gen = make_rng(rng)
    cache = cache or PredictionCache()
    T = boosting_rounds(m) if T_max is None else min(T_max, boosting_rounds(m))
    w = np.full(m, 1.0 / m)
    blocks = []
    for t in range(T):
        res = None
        for _ in range(RETRIES + 1):
            res = weak_learner_search(cls, S_prime, w, k, gen, cache)
            if res.success:
                break
        if not res.success:
            raise BoostingError(
                f"weak learner found no block with weighted error <= 1/3 in round {t} "
                f"(best {res.error:.4f}, k={k}); is the sample realizable?",
                round_index=t,
            )
        blocks.append(res.R)
        wrong = cache.predict(cls, PredictionCache.content(S_prime, res.R), S_prime.points) != S_prime.labels
        w = np.where(wrong, 2 * w, w)
        w /= w.sum()
        if np.all(majority_predictions(cls, S_prime, tuple(blocks), S_prime.points, cache) == S_prime.labels):
            return CompressionCandidate(name or cls.name, tuple(blocks), k, len(blocks), source="boost")
    raise BoostingError(f"majority still wrong on S' after {T} rounds", round_index=T)


@dataclass(frozen=True)
class Subsequence:
    behaviour: np.ndarray
    indices: tuple
    empty_restriction: bool


def realizable_subsequence(cls, S: LabeledSample) -> Subsequence:
    """ERM over the behaviours on dom(S) (ties: lexicographically smallest) and the pairs it fits."""
    U = S.domain()
    rows = cls.restrict(U)
    if rows.shape[0] == 0:
        return Subsequence(np.zeros(0, dtype=np.uint8), (), True)
    n0, n1 = S.label_counts(U)
    mis = rows.astype(np.int64) @ n0 + (1 - rows.astype(np.int64)) @ n1
    b = rows[int(np.argmin(mis))]
    pos = {p: j for j, p in enumerate(U)}
    cols = np.array([pos[p] for p in S.points.tolist()], dtype=np.int64)
    keep = np.flatnonzero(b[cols] == S.labels) if len(S) else np.zeros(0, dtype=np.int64)
    return Subsequence(b, tuple(keep.tolist()), False)


def default_k_grid(cls, S, vc_cap=None):
    vc = vc_of_restriction(cls, S.domain(), cap=vc_cap)
    top = min(3 * vc, len(S) // 2)
    return list(range(1, top + 1))


def _small_candidates(S, name, max_len):
    """All index sequences of length <= max_len, one per distinct training content."""
    first = {}
    for i, pair in enumerate(zip(S.points.tolist(), S.labels.tolist())):
        first.setdefault(pair, i)
    reps = sorted(first.values())
    out = [CompressionCandidate(name, (), 0, 0, source="small")]
    if max_len >= 1:
        out += [CompressionCandidate(name, ((i,),), 1, 1, source="small") for i in reps]
    if max_len >= 2:
        for a, b in combinations(reps, 2):
            out.append(CompressionCandidate(name, ((a, b),), 2, 1, source="small"))
            out.append(CompressionCandidate(name, ((a,), (b,)), 1, 2, source="small"))
    return out


def _content_key(S, cand):
    return tuple(sorted(PredictionCache.content(S, b) for b in cand.blocks))


def candidate_compressions(cls, S: LabeledSample, k_grid=None, rng=None, cache=None,
                           vc_cap=None, pair_budget=PAIR_BUDGET, seed=None):
    """Boosting-built candidates for each k plus every index sequence of length <= 2.

    The length-2 enumeration is dropped to length 1 (or 0) when the number of
    candidates times |dom(S)| would exceed ``pair_budget``.
    """
    from .concepts import make_rng

    cache = cache or PredictionCache()
    name = cls.name
    sub = realizable_subsequence(cls, S)
    cands = []
    if sub.indices:
        S_prime = S.subset(sub.indices)
        grid = default_k_grid(cls, S, vc_cap) if k_grid is None else list(k_grid)
        for k in grid:
            gen = make_rng(np.random.SeedSequence([0 if seed is None else seed, k])) if rng is None else rng
            try:
                c = boost(cls, S_prime, k, rng=gen, cache=cache, name=name)
            except BoostingError:
                continue
            blocks = tuple(tuple(sub.indices[i] for i in b) for b in c.blocks)
            cands.append(CompressionCandidate(name, blocks, c.k, c.T, source="boost"))
    distinct = len(set(zip(S.points.tolist(), S.labels.tolist())))
    width = max(1, len(S.domain()))
    max_len = 2
    while max_len > 0:
        count = 1 + distinct + (distinct * (distinct - 1) if max_len == 2 else 0)
        if count * width <= pair_budget:
            break
        max_len -= 1
    cands += _small_candidates(S, name, max_len)
    seen = set()
    out = []
    for c in sorted(cands, key=lambda c: (len(c.J), c.J, c.blocks)):
        key = _content_key(S, c)
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    return out


def selection_score(error_on_S, J_len, m, tau_hat, delta, c_prime=1.0) -> float:
    if m < 2 or tau_hat < 1:
        raise InputError("selection score needs m >= 2 and tau >= 1")
    return float(error_on_S) + selection_penalty(J_len, m, tau_hat, delta, c_prime)


def selection_penalty(J_len, m, tau_hat, delta, c_prime=1.0) -> float:
    return c_prime * math.sqrt(((math.log(tau_hat) + J_len) * math.log(m) + math.log(1 / delta)) / m)


def theorem_bound(vc_val, tau_val, m, delta, big_O_constant=1.0) -> float:
    if m < 2:
        raise InputError("bound needs m >= 2")
    return big_O_constant * math.sqrt(((vc_val + math.log(tau_val)) * math.log(m) ** 2 + math.log(1 / delta)) / m)


@dataclass(frozen=True)
class LedgerRow:
    class_name: str
    member: int
    candidate: CompressionCandidate
    emp_err: Fraction
    penalty: float
    score: float

    def order_key(self):
        return (self.score, len(self.candidate.J), self.member, self.candidate.J)


@dataclass
class SelectionLedger:
    rows: list = field(default_factory=list)
    selected: int = -1
    tau_hat: int = 1
    tau_mode: str = "sample"

    def best(self) -> LedgerRow:
        return self.rows[self.selected]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["class", "J_len", "J_indices", "emp_err", "penalty", "score", "selected"])
            for i, r in enumerate(self.rows):
                J = "|".join(" ".join(map(str, b)) for b in r.candidate.blocks)
                w.writerow([r.class_name, len(r.candidate.J), J, repr(float(r.emp_err)), repr(r.penalty),
                            repr(r.score), int(i == self.selected)])


def estimate_tau(collection: Collection, S: LabeledSample, tau_mode="sample", cap=None):
    """Growth estimate for the learner and the member grouping it implies."""
    U = S.domain()
    if tau_mode == "sample":
        ids = equivalence_partition(collection, U, cap=cap)
        return max(ids) + 1, ids
    if tau_mode == "upper":
        ids = equivalence_partition(collection, U, cap=cap, mode="upper")
        return max(ids) + 1, ids
    if tau_mode == "analytic":
        if collection.tau_bound is None:
            raise InputError("collection has no analytic growth bound")
        ids = equivalence_partition(collection, U, cap=cap, mode="upper")
        return max(1, int(collection.tau_bound(len(S)))), ids
    raise InputError(f"unknown tau mode {tau_mode!r}")


def collection_learn(collection: Collection, S: LabeledSample, delta, c_prime=1.0, tau_mode="sample",
                     seed=0, k_grid=None, vc_cap=None, tau_cap=None, pair_budget=PAIR_BUDGET):
    """Select the (class, index sequence) with the smallest penalised sample error.

    Members equivalent on dom(S) give identical predictions on S, so
    candidates are generated once per equivalence class (for its earliest
    member) and the ledger repeats the rows for every member.
    """
    m = len(S)
    if m < 2:
        raise InputError("the learner needs at least two examples")
    S.check_domain(collection.domain_size)
    tau_hat, ids = estimate_tau(collection, S, tau_mode, cap=tau_cap)
    cache = PredictionCache()
    per_group = {}
    for idx, (cls, gid) in enumerate(zip(collection, ids)):
        if gid in per_group:
            continue
        cands = candidate_compressions(cls, S, k_grid=k_grid, cache=cache, vc_cap=vc_cap,
                                       pair_budget=pair_budget, seed=seed * 1_000_003 + idx)
        scored = []
        for c in cands:
            pred = majority_predictions(cls, S, c.blocks, S.points, cache)
            err = Fraction(int(np.count_nonzero(pred != S.labels)), m)
            pen = selection_penalty(len(c.J), m, tau_hat, delta, c_prime)
            scored.append((c, err, pen, float(err) + pen))
        per_group[gid] = (idx, scored)
    ledger = SelectionLedger(tau_hat=tau_hat, tau_mode=tau_mode)
    for idx, (cls, gid) in enumerate(zip(collection, ids)):
        for c, err, pen, score in per_group[gid][1]:
            ledger.rows.append(LedgerRow(cls.name, idx, c, err, pen, score))
    if not ledger.rows:
        raise InputError("no candidate compressions for any member")
    ledger.selected = min(range(len(ledger.rows)), key=lambda i: ledger.rows[i].order_key())
    best = ledger.best()
    rep = collection[per_group[ids[best.member]][0]]
    blocks = best.candidate.blocks

    def fn(points):
        return majority_predictions(rep, S, blocks, points, cache)

    prov = {"class": best.class_name, "J": best.candidate.J, "blocks": blocks,
            "score": best.score, "tau_hat": tau_hat}
    return Predictor(collection.domain_size, fn=fn, provenance=prov), ledger
