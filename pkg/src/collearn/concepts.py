"""Finite domains, total and partial hypotheses, classes, samples and distributions.

Labels are stored as ``uint8`` with ``STAR`` (=2) marking an undefined value.
A ``STAR`` never equals a label, so it always counts as a prediction error.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError

STAR = 2
_CHARS = {"0": 0, "1": 1, "*": STAR}


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"environment variable {name} must be an integer, got {raw!r}") from exc


def default_vc_cap():
    return _env_int("COLLEARN_VC_CAP", 20)


def default_tau_cap():
    return _env_int("COLLEARN_TAU_CAP", 16)


def make_rng(seed=None):
    """Seeded generator backed by the counter-based Philox bit generator.

    Passing an existing ``np.random.Generator`` returns it unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_rngs(seed, n):
    """``n`` independent generators split deterministically from ``seed``."""
    return [make_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def as_points(U, domain_size=None) -> tuple:
    """Canonical form of a point subset: sorted tuple of distinct ints."""
    pts = sorted({int(u) for u in U})
    if pts and (pts[0] < 0 or (domain_size is not None and pts[-1] >= domain_size)):
        raise InputError(f"point index out of range for domain of size {domain_size}: {pts}")
    return tuple(pts)


def parse_labels(text: str) -> np.ndarray:
    try:
        return np.array([_CHARS[c] for c in text.strip()], dtype=np.uint8)
    except KeyError as exc:
        raise InputError(f"label string may only contain 0, 1, *: {text!r}") from exc


def format_labels(labels) -> str:
    return "".join("01*"[int(v)] for v in labels)


def rows_to_codes(rows: np.ndarray):
    """Integer code per row, bit j set iff column j is 1 (rows must be total)."""
    width = rows.shape[1]
    if width <= 62:
        weights = np.left_shift(np.int64(1), np.arange(width, dtype=np.int64))
        return rows.astype(np.int64) @ weights
    return [int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little") for r in rows]


def unique_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return np.ascontiguousarray(rows, dtype=np.uint8)
    if rows.shape[1] == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    return np.unique(rows.astype(np.uint8), axis=0)


@dataclass
class Domain:
    """Indexed finite point set ``0..size-1`` with optional metric and similarity weights."""

    size: int
    metric: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.size < 1:
            raise InputError("domain size must be positive")
        if self.metric is not None:
            self.metric = np.asarray(self.metric, dtype=float)
            _check_square(self.metric, self.size, "metric")
            if np.any(self.metric < 0):
                raise InputError("metric entries must be nonnegative")
            if np.any(np.diag(self.metric) != 0):
                raise InputError("metric must have a zero diagonal")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            _check_square(self.weights, self.size, "weights")
            if np.any(self.weights < 0) or np.any(self.weights > 1):
                raise InputError("weights must lie in [0, 1]")

    @classmethod
    def from_coordinates(cls, coords, weights=None):
        """Euclidean metric over points given as rows (or a 1-d array of positions)."""
        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        diff = coords[:, None, :] - coords[None, :, :]
        metric = np.sqrt((diff ** 2).sum(-1))
        return cls(len(coords), metric=metric, weights=weights)

    def diameter(self) -> float:
        if self.metric is None:
            raise InputError("diameter requires a metric")
        return float(self.metric.max())


def _check_square(mat, n, what):
    if mat.shape != (n, n):
        raise InputError(f"{what} must be {n}x{n}, got {mat.shape}")
    if not np.allclose(mat, mat.T, atol=1e-12):
        raise InputError(f"{what} must be symmetric")


class ConceptClass:
    """Anything that can report its total behaviours on a point subset.

    Subclasses implement ``_restrict(U)`` for a canonical ``U`` and set
    ``is_total``. Restrictions are memoised per subset.
    """

    name: str = "class"
    domain_size: int = 0
    is_total: bool = False
    _cache_limit = 50_000

    def _restrict(self, U: tuple) -> np.ndarray:
        raise NotImplementedError

    def restrict(self, U) -> np.ndarray:
        """Distinct total behaviours on ``sorted(U)``, rows sorted lexicographically."""
        U = as_points(U, self.domain_size)
        cache = self.__dict__.setdefault("_rcache", {})
        hit = cache.get(U)
        if hit is None:
            if len(cache) > self._cache_limit:
                cache.clear()
            hit = unique_rows(self._restrict(U))
            hit.setflags(write=False)
            cache[U] = hit
        return hit

    def trace_key(self, U):
        """Hashable key; equal keys on ``U`` guarantee equivalence on ``U``.

        The default is the total restriction, which is exact for total classes.
        """
        U = as_points(U, self.domain_size)
        rows = self.restrict(U)
        return ("restrict", rows.shape, rows.tobytes())

    def point_count(self):
        return self.domain_size

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class ExplicitClass(ConceptClass):
    """A finite class stored as a deduplicated matrix of label vectors over {0, 1, STAR}."""

    def __init__(self, hypotheses, name="H", allow_empty=False):
        H = np.asarray(hypotheses, dtype=np.uint8)
        if H.ndim != 2:
            raise InputError("hypotheses must be a 2-d array (one row per hypothesis)")
        if H.shape[0] == 0 and not allow_empty:
            raise InputError("an explicit class must contain at least one hypothesis")
        if np.any(H > STAR):
            raise InputError("labels must be 0, 1 or STAR")
        self.hypotheses = unique_rows(H) if H.shape[0] else H
        self.hypotheses.setflags(write=False)
        self.name = name
        self.domain_size = H.shape[1]
        self.is_total = bool(np.all(self.hypotheses != STAR))

    @classmethod
    def from_strings(cls, lines: Iterable[str], name="H"):
        vecs = [parse_labels(s) for s in lines if s.strip()]
        if not vecs:
            raise InputError("no hypotheses given")
        if len({len(v) for v in vecs}) != 1:
            raise InputError("all hypotheses must have the same length")
        return cls(np.stack(vecs), name=name)

    def __len__(self):
        return self.hypotheses.shape[0]

    def _restrict(self, U):
        sub = self.hypotheses[:, list(U)]
        return sub[np.all(sub != STAR, axis=1)]

    def trace_key(self, U):
        if self.is_total:
            return super().trace_key(U)
        sub = unique_rows(self.hypotheses[:, list(as_points(U, self.domain_size))])
        return ("trace", sub.shape, sub.tobytes())


class AllFunctionsClass(ConceptClass):
    """Every total function on the domain, generated on demand."""

    is_total = True

    def __init__(self, domain_size, name="all-functions", cap=22):
        self.domain_size = int(domain_size)
        self.name = name
        self.cap = cap

    def _restrict(self, U):
        n = len(U)
        if n > self.cap:
            raise ResourceError(f"full cube on {n} points exceeds cap {self.cap}")
        codes = np.arange(2 ** n, dtype=np.int64)
        return ((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8)

    def trace_key(self, U):
        return ("all", as_points(U, self.domain_size))


def restrict(cls: ConceptClass, U) -> np.ndarray:
    return cls.restrict(U)


@dataclass(frozen=True)
class LabeledSample:
    """Sequence of (point, label) pairs; repeats allowed."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1)
        labs = np.asarray(self.labels, dtype=np.uint8).reshape(-1)
        if pts.shape != labs.shape:
            raise InputError("points and labels must have equal length")
        if np.any(labs > 1):
            raise InputError("sample labels must be 0 or 1")
        if np.any(pts < 0):
            raise InputError("negative point index")
        pts.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labs)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.uint8))
        pts, labs = zip(*pairs)
        return cls(np.array(pts), np.array(labs))

    def __len__(self):
        return len(self.points)

    def pairs(self):
        return list(zip(self.points.tolist(), self.labels.tolist()))

    def domain(self) -> tuple:
        return as_points(self.points)

    def subset(self, idx) -> "LabeledSample":
        idx = np.asarray(list(idx), dtype=np.int64)
        return LabeledSample(self.points[idx], self.labels[idx])

    def drop(self, i) -> "LabeledSample":
        keep = np.ones(len(self), dtype=bool)
        keep[i] = False
        return LabeledSample(self.points[keep], self.labels[keep])

    def check_domain(self, domain_size):
        if len(self) and self.points.max() >= domain_size:
            raise InputError(f"sample point {int(self.points.max())} outside domain of size {domain_size}")

    def label_counts(self, U=None):
        """Per-point counts of label 0 and label 1 over ``U`` (default: dom(S))."""
        U = self.domain() if U is None else tuple(U)
        pos = {p: j for j, p in enumerate(U)}
        n0 = np.zeros(len(U), dtype=np.int64)
        n1 = np.zeros(len(U), dtype=np.int64)
        for p, y in zip(self.points.tolist(), self.labels.tolist()):
            (n1 if y else n0)[pos[p]] += 1
        return n0, n1


class FiniteDistribution:
    """Explicit probability mass over (point, label) pairs."""

    def __init__(self, atoms):
        atoms = list(atoms)
        if not atoms:
            raise InputError("distribution needs at least one atom")
        seen = set()
        for p, y, q in atoms:
            if (int(p), int(y)) in seen:
                raise InputError(f"duplicate atom for point {p}, label {y}")
            seen.add((int(p), int(y)))
            if int(y) not in (0, 1):
                raise InputError("atom labels must be 0 or 1")
            if not q > 0:
                raise InputError("atom probabilities must be positive")
            if int(p) < 0:
                raise InputError("negative point index")
        self.points = np.array([int(a[0]) for a in atoms], dtype=np.int64)
        self.labels = np.array([int(a[1]) for a in atoms], dtype=np.uint8)
        self.probs = np.array([float(a[2]) for a in atoms], dtype=float)
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise InputError(f"probabilities sum to {self.probs.sum()!r}, not 1")

    @classmethod
    def uniform_labelled(cls, points, labels):
        points = list(points)
        q = 1.0 / len(points)
        return cls([(p, y, q) for p, y in zip(points, labels)])

    @classmethod
    def from_eta(cls, marginal, eta):
        """Build from a marginal over points and a conditional P(y=1 | x)."""
        atoms = []
        for p, (w, e) in enumerate(zip(marginal, eta)):
            if w <= 0:
                continue
            if e > 0:
                atoms.append((p, 1, w * e))
            if e < 1:
                atoms.append((p, 0, w * (1 - e)))
        total = sum(a[2] for a in atoms)
        return cls([(p, y, q / total) for p, y, q in atoms])

    def __len__(self):
        return len(self.points)

    def atoms(self):
        return list(zip(self.points.tolist(), self.labels.tolist(), self.probs.tolist()))

    def support(self) -> tuple:
        return as_points(self.points)

    def mass_by_label(self, U=None):
        """Per-point masses ``(P(x,0), P(x,1))`` over ``U`` (default: support)."""
        U = self.support() if U is None else tuple(U)
        pos = {p: j for j, p in enumerate(U)}
        p0 = np.zeros(len(U))
        p1 = np.zeros(len(U))
        for p, y, q in zip(self.points.tolist(), self.labels.tolist(), self.probs.tolist()):
            (p1 if y else p0)[pos[p]] += q
        return p0, p1

    def marginal(self):
        U = self.support()
        p0, p1 = self.mass_by_label(U)
        return U, p0 + p1

    def eta(self):
        """Support points, their marginal mass and P(y=1 | x)."""
        U = self.support()
        p0, p1 = self.mass_by_label(U)
        px = p0 + p1
        return U, px, p1 / px

    def sample(self, m, rng=None) -> LabeledSample:
        if m < 1:
            raise InputError("sample size must be at least 1")
        rng = make_rng(rng)
        idx = rng.choice(len(self.probs), size=m, p=self.probs)
        return LabeledSample(self.points[idx], self.labels[idx])


def sample(D: FiniteDistribution, m, rng=None) -> LabeledSample:
    return D.sample(m, rng)


class Predictor:
    """A total {0,1} labelling of the domain, evaluated lazily and cached."""

    def __init__(self, domain_size, fn: Callable | None = None, labels=None, provenance=None):
        self.domain_size = int(domain_size)
        self.provenance = dict(provenance or {})
        self._fn = fn
        self._known = np.full(self.domain_size, -1, dtype=np.int8)
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int8)
            if labels.shape != (self.domain_size,) or np.any((labels != 0) & (labels != 1)):
                raise InputError("predictor labels must be a total {0,1} vector over the domain")
            self._known[:] = labels
        elif fn is None:
            raise InputError("predictor needs labels or a prediction function")

    @classmethod
    def from_labels(cls, labels, provenance=None):
        labels = np.asarray(labels)
        return cls(len(labels), labels=labels, provenance=provenance)

    def predict(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.int64).reshape(-1)
        todo = np.unique(pts[self._known[pts] < 0])
        if len(todo):
            vals = np.asarray(self._fn(todo), dtype=np.int8)
            if np.any((vals != 0) & (vals != 1)):
                raise InputError("prediction function returned a non-binary label")
            self._known[todo] = vals
        return self._known[pts].astype(np.uint8)

    @property
    def labels(self) -> np.ndarray:
        return self.predict(np.arange(self.domain_size))

    def __call__(self, points):
        return self.predict(points)


def _values_at(h, points):
    if isinstance(h, Predictor):
        return h.predict(points)
    return np.asarray(h, dtype=np.uint8)[points]


def err_sample(h, S: LabeledSample) -> Fraction:
    """Fraction of pairs where ``h`` disagrees with the label (STAR always disagrees)."""
    if len(S) == 0:
        raise InputError("error on an empty sample is undefined")
    vals = _values_at(h, S.points)
    return Fraction(int(np.count_nonzero(vals != S.labels)), len(S))


def err_dist(h, D: FiniteDistribution) -> float:
    vals = _values_at(h, D.points)
    return float(D.probs[vals != D.labels].sum())


def _partial_class_min(cls, U, w0, w1, cap):
    """min over partial members of the weighted error, STAR counted as error.

    Enumerates every T subset of U: a partial member defined exactly on T
    restricts to some b in restrict(cls, T).
    """
    U = tuple(U)
    if len(U) > cap:
        raise ResourceError(f"class error over {len(U)} points exceeds cap {cap}")
    total = w0 + w1
    best = math.inf
    for r in range(len(U), -1, -1):
        for pos in combinations(range(len(U)), r):
            outside = total.sum() - total[list(pos)].sum()
            if outside >= best:
                continue
            rows = cls.restrict([U[j] for j in pos])
            if rows.shape[0] == 0:
                continue
            mis = rows @ w0[list(pos)] + (1 - rows.astype(float)) @ w1[list(pos)] if pos else np.zeros(rows.shape[0])
            best = min(best, float(mis.min()) + outside)
    return best


def err_class_dist(cls, D: FiniteDistribution, cap=None) -> float:
    """inf over members of the distribution error (finite class: min)."""
    U = D.support()
    p0, p1 = D.mass_by_label(U)
    if isinstance(cls, ExplicitClass):
        H = cls.hypotheses[:, list(U)]
        err = ((H != 0) * p0).sum(1) + ((H != 1) * p1).sum(1)
        return float(err.min())
    if cls.is_total:
        rows = cls.restrict(U)
        if rows.shape[0] == 0:
            return 1.0
        return float((rows @ p0 + (1 - rows.astype(float)) @ p1).min())
    return _partial_class_min(cls, U, p0, p1, cap or default_tau_cap())


def err_class_sample(cls, S: LabeledSample, cap=None) -> Fraction:
    """min over members of ``err_sample`` (partial members may leave points undefined)."""
    if len(S) == 0:
        raise InputError("error on an empty sample is undefined")
    if isinstance(cls, ExplicitClass):
        H = cls.hypotheses[:, S.points]
        return Fraction(int(np.count_nonzero(H != S.labels, axis=1).min()), len(S))
    U = S.domain()
    n0, n1 = S.label_counts(U)
    if cls.is_total:
        rows = cls.restrict(U)
        if rows.shape[0] == 0:
            return Fraction(1)
        mis = rows.astype(np.int64) @ n0 + (1 - rows.astype(np.int64)) @ n1
        return Fraction(int(mis.min()), len(S))
    best = _partial_class_min(cls, U, n0.astype(float), n1.astype(float), cap or default_tau_cap())
    return Fraction(int(round(best)), len(S))


def _apriori_largest(points: Sequence[int], shattered: Callable[[tuple], bool], cap: int, ceiling=None) -> int:
    """Largest subset of ``points`` satisfying a hereditary predicate.

    Grows shattered sets level by level; a set is only tested when all of its
    one-smaller subsets passed.
    """
    frontier = [()]
    best = 0
    limit = len(points) if ceiling is None else min(len(points), ceiling)
    while frontier and best < limit:
        if best >= cap:
            raise ResourceError(f"shattered sets reach the cap of {cap} points")
        prev = set(frontier)
        nxt = []
        if best == 0:
            cands = [(p,) for p in points]
        else:
            cands = []
            by_prefix = {}
            for t in frontier:
                by_prefix.setdefault(t[:-1], []).append(t[-1])
            for prefix, tails in by_prefix.items():
                tails.sort()
                for a, b in combinations(tails, 2):
                    cand = prefix + (a, b)
                    if all(cand[:i] + cand[i + 1:] in prev for i in range(len(cand) - 2)):
                        cands.append(cand)
        for cand in cands:
            if shattered(cand):
                nxt.append(cand)
        if not nxt:
            break
        frontier = nxt
        best += 1
    return best


@dataclass(frozen=True)
class VCReport:
    vc: int
    has_total_behaviour: bool


def vc_of_restriction(cls: ConceptClass, U, cap=None, mode="subsets", detailed=False):
    """VC dimension of the class on ``U`` by exhaustive shattering search.

    ``mode="subsets"`` (default): largest ``T`` within ``U`` with
    ``restrict(cls, T)`` the full cube. ``mode="projection"``: VC dimension of
    the set of total behaviours ``restrict(cls, U)``. Both agree on total classes.
    """
    cap = default_vc_cap() if cap is None else cap
    U = as_points(U, cls.domain_size)
    if mode not in ("subsets", "projection"):
        raise InputError(f"unknown vc mode {mode!r}")
    analytic = getattr(cls, "vc_on", None)
    if analytic is not None:
        vc = analytic(U)
        return VCReport(vc, cls.restrict(U).shape[0] > 0) if detailed else vc
    rows = cls.restrict(U)
    projection = mode == "projection" or cls.is_total
    has = rows.shape[0] > 0
    if projection:
        if rows.shape[0] <= 1:
            vc = 0
        else:
            ceiling = int(math.floor(math.log2(rows.shape[0])))
            pos = {p: j for j, p in enumerate(U)}
            varying = [p for p in U if 0 < rows[:, pos[p]].sum() < rows.shape[0]]

            def shattered(T):
                sub = rows[:, [pos[p] for p in T]]
                return len(np.unique(rows_to_codes(sub))) == 2 ** len(T)

            vc = _apriori_largest(varying, shattered, cap, ceiling)
    else:

        def shattered(T):
            return cls.restrict(T).shape[0] == 2 ** len(T)

        vc = _apriori_largest(list(U), shattered, cap)
    return VCReport(vc, has) if detailed else vc


def empirical_quantile(values, delta) -> int:
    """Smallest observed ``v`` with at least a ``1 - delta`` fraction of values <= v."""
    vals = sorted(values)
    if not vals:
        raise InputError("quantile of an empty list")
    idx = max(0, math.ceil((1 - delta) * len(vals) - 1e-12) - 1)
    return vals[idx]


def default_trials(delta):
    return max(200, math.ceil(10 / delta))


def vc_dist_estimate(cls, D: FiniteDistribution, m, delta, trials=None, rng=None, cap=None) -> int:
    """Empirical (1 - delta)-quantile of ``vc(cls, dom(S))`` over ``S ~ D^m``."""
    rng = make_rng(rng)
    trials = default_trials(delta) if trials is None else trials
    vals = [vc_of_restriction(cls, D.sample(m, rng).domain(), cap=cap) for _ in range(trials)]
    return empirical_quantile(vals, delta)


def err_star_estimate(cls, D: FiniteDistribution, n, trials=200, rng=None) -> float:
    """Monte Carlo mean over ``S ~ D^n`` of the smallest member error on ``S``."""
    rng = make_rng(rng)
    total = Fraction(0)
    for _ in range(trials):
        total += err_class_sample(cls, D.sample(n, rng))
    return float(total / trials)


def phi_sparseness(D: FiniteDistribution, gamma) -> float:
    """Marginal mass of points whose conditional label probability is within gamma of 1/2."""
    _, px, eta = D.eta()
    return float(px[np.abs(eta - 0.5) <= gamma + 1e-15].sum())


def psi_lipschitz(D: FiniteDistribution, L, metric, form="nested") -> float:
    """How far the conditional label probability is from being L-Lipschitz.

    ``form="nested"``: mass of x having some support point z with
    ``|eta(x) - eta(z)| > L * rho(x, z)``. ``form="pairwise"``: probability of
    that event for an independent pair (x, z).
    """
    if metric is None:
        raise InputError("psi_lipschitz requires a metric")
    metric = np.asarray(metric, dtype=float)
    U, px, eta = D.eta()
    idx = list(U)
    rho = metric[np.ix_(idx, idx)]
    bad = np.abs(eta[:, None] - eta[None, :]) > L * rho + 1e-15
    if form == "nested":
        return float(px[bad.any(axis=1)].sum())
    if form == "pairwise":
        return float((px[:, None] * px[None, :])[bad].sum())
    raise InputError(f"unknown psi form {form!r}")


def _read_open(path):
    try:
        return open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def read_class_file(path, name=None) -> ExplicitClass:
    """One hypothesis per line over the characters 0, 1, *."""
    vecs = []
    with _read_open(path) as fh:
        for lineno, ln in enumerate(fh, 1):
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            try:
                vecs.append(parse_labels(ln))
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
            if len(vecs[-1]) != len(vecs[0]):
                raise InputError(f"{path}:{lineno}: expected {len(vecs[0])} labels, got {len(vecs[-1])}")
    if not vecs:
        raise InputError(f"{path}: no hypotheses")
    return ExplicitClass(np.stack(vecs), name=name or os.path.splitext(os.path.basename(path))[0])


def write_class_file(cls: ExplicitClass, path):
    with open(path, "w") as fh:
        for row in cls.hypotheses:
            fh.write(format_labels(row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with _read_open(path) as fh:
        for lineno, r in enumerate(csv.reader(fh), 1):
            if not r:
                continue
            try:
                rows.append([float(v) for v in r])
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: non-numeric entry") from exc
    mat = np.array(rows, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InputError(f"{path}: expected a square CSV matrix, got shape {mat.shape}")
    return mat


def write_matrix_csv(mat, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in np.asarray(mat):
            w.writerow([repr(float(v)) for v in row])


def read_distribution_csv(path) -> FiniteDistribution:
    """Rows ``point,label,prob``; an optional header line is skipped."""
    atoms = []
    with _read_open(path) as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].strip() == "point":
                continue
            try:
                atoms.append((int(row[0]), int(row[1]), float(row[2])))
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}:{lineno}: expected point,label,prob") from exc
    return FiniteDistribution(atoms)


def write_distribution_csv(D: FiniteDistribution, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["point", "label", "prob"])
        for p, y, q in D.atoms():
            w.writerow([p, y, repr(q)])
