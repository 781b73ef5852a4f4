"""Property checks behind ``collearn verify-invariants`` and the acceptance tests.

Each ``check_*`` function draws its own seeded instances, compares library
output against a brute-force oracle where one exists, and returns a
``CheckResult``. ``quick=True`` shrinks instance counts for smoke runs.
"""
from __future__ import annotations

import math
import os
import statistics
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .concepts import (
    AllFunctionsClass,
    Domain,
    ExplicitClass,
    LabeledSample,
    Predictor,
    err_class_sample,
    err_dist,
    make_rng,
    vc_of_restriction,
)
from .errors import BoostingError, InputError
from .groupings import (
    HierarchicalClustering,
    ForbiddenSpec,
    RealValuedClass,
    breakpoint_representatives,
    contrastive_spec,
    err_gamma_class,
    fat_shattering_zero_witness,
    forbidden_class,
    forbidden_collection,
    hc_collection,
    lipschitz_grid,
    nn_spec,
    penalty_breakpoints,
    r_net,
    similarity_spec,
    translated_class,
    vc_at_distance,
    vc_at_radius,
)
from .growth import (
    Collection,
    equivalence_partition,
    exponential_example,
    growth_function_pi,
    tau_of_m,
    tau_of_set,
    union_class,
)
from .learner import PredictionCache, boost, boosting_rounds, majority_predictions
from .oig import build_graph, exhaustive_min_outdegree, loo_error, orient_min_outdegree
from .srm import adversarial_instance


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


# ---------------------------------------------------------------- oracles

def max_packing_size(domain: Domain, r) -> int:
    """Largest subset with all pairwise distances above r, by exhaustive search."""
    M = domain.metric
    n = domain.size
    for size in range(n, 0, -1):
        for T in combinations(range(n), size):
            if all(M[a, b] > r for a, b in combinations(T, 2)):
                return size
    return 0


def brute_forbidden_restrict(base: ExplicitClass, spec: ForbiddenSpec, r, U) -> set:
    """Behaviours of ``base`` on U that avoid every forbidden pattern on tuples with penalty >= r."""
    U = tuple(U)
    pos = {p: j for j, p in enumerate(U)}
    out = set()
    for h in base.hypotheses[:, list(U)]:
        if np.any(h == 2):
            continue
        ok = True
        for t in spec.tuples(U):
            if spec.penalty(t) >= r and tuple(int(h[pos[p]]) for p in t) in spec.forbidden(t):
                ok = False
                break
        if ok:
            out.add(tuple(h.tolist()))
    return out


def _random_class(rng, N, size, star_prob=0.0, name="H"):
    from .experiments import random_class

    return random_class(rng, N, size, star_prob, name)


def _realizable(rng, cls, n):
    from .experiments import realizable_sample

    return realizable_sample(rng, cls, n)


def _scale(n, quick, floor=5):
    return max(floor, n // 10) if quick else n


# ---------------------------------------------------------------- criteria

def check_oig_loo(n_instances=200, seed=0, quick=False) -> CheckResult:
    rng = make_rng([seed, 1])
    n_instances = _scale(n_instances, quick)
    bad = []
    done = 0
    while done < n_instances:
        N = int(rng.integers(2, 13))
        star = 0.15 if done % 2 else 0.0
        cls = _random_class(rng, N, int(rng.integers(1, 201)), star)
        n = int(rng.integers(1, 11))
        try:
            S = _realizable(rng, cls, n)
        except InputError:
            continue
        res = loo_error(cls, S)
        if not (res.realizable and res.error <= res.bound):
            bad.append((done, str(res.error), str(res.bound)))
        done += 1
    return CheckResult("oig-loo", not bad, f"{n_instances} instances, {len(bad)} violations {bad[:3]}")


def check_orientation(n_graphs=100, seed=0, quick=False, max_edges=12) -> CheckResult:
    rng = make_rng([seed, 2])
    n_graphs = _scale(n_graphs, quick)
    bad = []
    done = 0
    while done < n_graphs:
        N = int(rng.integers(2, 6))
        cls = _random_class(rng, N, int(rng.integers(2, 2 ** N + 1)))
        g = build_graph(cls, range(N))
        if not 1 <= g.n_edges <= max_edges:
            continue
        best = exhaustive_min_outdegree(g, max_edges=max_edges)
        got = orient_min_outdegree(g).max_out_degree()
        vc = vc_of_restriction(cls, range(N), mode="projection")
        if got != best or got > vc:
            bad.append((done, got, best, vc))
        done += 1
    return CheckResult("orientation", not bad, f"{n_graphs} graphs, {len(bad)} mismatches {bad[:3]}")


def check_boosting(n_instances=100, seed=0, quick=False) -> CheckResult:
    rng = make_rng([seed, 3])
    n_instances = _scale(n_instances, quick)
    bad = []
    for i in range(n_instances):
        N = int(rng.integers(4, 33))
        cls = _random_class(rng, N, int(rng.integers(2, 61)))
        m = int(rng.integers(2, 65))
        S = _realizable(rng, cls, m)
        k = 3 * vc_of_restriction(cls, S.domain())
        cache = PredictionCache()
        try:
            c = boost(cls, S, k, rng=rng, cache=cache)
        except BoostingError as exc:
            bad.append((i, f"round {exc.round_index}"))
            continue
        ok = np.all(majority_predictions(cls, S, c.blocks, S.points, cache) == S.labels)
        if not ok or c.T > boosting_rounds(m):
            bad.append((i, c.T))
    return CheckResult("boosting", not bad, f"{n_instances} instances, {len(bad)} failures {bad[:3]}")


def chain_hierarchy(n) -> HierarchicalClustering:
    """Points join one at a time, so every level induces a different partition."""
    return HierarchicalClustering.from_merges(n, [(0, j) for j in range(1, n)])


def check_hc_tau(n_instances=100, seed=0, quick=False) -> CheckResult:
    rng = make_rng([seed, 4])
    n_instances = _scale(n_instances, quick)
    bad = []
    for i in range(n_instances):
        N = int(rng.integers(2, 13))
        hc = HierarchicalClustering.random(N, rng)
        base = AllFunctionsClass(N) if i % 2 == 0 else _random_class(rng, N, int(rng.integers(1, 60)))
        s = int(rng.integers(1, min(N, 10) + 1))
        U = tuple(sorted(rng.choice(N, size=s, replace=False).tolist()))
        tau = tau_of_set(hc_collection(base, hc), U)
        if tau > s:
            bad.append((i, tau, s))
    n = 8
    tight = tau_of_set(hc_collection(AllFunctionsClass(n), chain_hierarchy(n)), range(n))
    ok = not bad and tight == n
    return CheckResult("hc-tau", ok, f"{n_instances} random pairs, {len(bad)} violations; chain on {n} points gives tau={tight}")


def _random_spec(rng, N, k):
    """Generic unordered k-spec with random forbidden patterns and coarse penalties (ties likely)."""
    table = {}
    for t in combinations(range(N), k):
        pats = frozenset(tuple(int(b) for b in rng.integers(0, 2, size=k)) for _ in range(int(rng.integers(0, 3))))
        table[t] = (pats, float(rng.integers(0, 5)) / 2)
    return ForbiddenSpec(k=k, forbidden=lambda t: table[t][0], penalty=lambda t: table[t][1], name=f"rand{k}")


def _spec_instance(rng, i, N):
    from .experiments import random_metric, random_weights

    k = 2 if i % 2 == 0 else 3
    kind = (i // 2) % 2
    if k == 2:
        spec = similarity_spec(random_weights(rng, N)) if kind == 0 else nn_spec(random_metric(rng, N, integer=True))
    else:
        spec = contrastive_spec(random_metric(rng, N, integer=True)) if kind == 0 else _random_spec(rng, N, 3)
    return k, spec


def check_forbidden_tau(n_instances=100, seed=0, quick=False) -> CheckResult:
    rng = make_rng([seed, 5])
    n_instances = _scale(n_instances, quick)
    bad = []
    for i in range(n_instances):
        m = int(rng.integers(2, 9))
        N = m + int(rng.integers(0, 3))
        k, spec = _spec_instance(rng, i, N)
        base = AllFunctionsClass(N) if i % 3 else _random_class(rng, N, int(rng.integers(1, 80)), name="B")
        U = tuple(sorted(rng.choice(N, size=m, replace=False).tolist()))
        breaks, _ = penalty_breakpoints(spec, U)
        # every breakpoint, every gap midpoint and both ends: one threshold in each constancy interval
        finite = sorted(p for p in breaks if math.isfinite(p))
        grid = set(finite) | {(a + b) / 2 for a, b in zip(finite, finite[1:])}
        grid |= {(finite[0] - 1) if finite else 0.0, (finite[-1] + 1) if finite else 1.0}
        oracle = [forbidden_class(base, spec, r, name=f"oracle@{r!r}") for r in sorted(grid)]
        tau = tau_of_set(Collection(oracle, name="oracle"), U)
        reps = list(forbidden_collection(base, spec, U))
        ids = equivalence_partition(Collection(reps + oracle, name="both"), U)
        hit = set(ids[len(reps):]) <= set(ids[:len(reps)])
        if tau > len(breaks) + 1 or not hit:
            bad.append((i, k, tau, len(breaks), hit))
    return CheckResult("forbidden-tau", not bad, f"{n_instances} instances, {len(bad)} violations {bad[:3]}")


def check_growth_properties(n_instances=200, seed=0, quick=False) -> CheckResult:
    rng = make_rng([seed, 6])
    n_instances = _scale(n_instances, quick)
    bad = []
    for i in range(n_instances):
        N = int(rng.integers(2, 7))
        C = ExplicitClass(np.unique(_random_class(rng, N, int(rng.integers(1, 2 ** N + 1))).hypotheses, axis=0), name="C")
        U = tuple(sorted(rng.choice(N, size=int(rng.integers(1, N + 1)), replace=False).tolist()))
        pi = growth_function_pi(C, U)
        one = tau_of_set(Collection([C], name="one"), U)
        singles = Collection([ExplicitClass(h[None], name=f"h{j}") for j, h in enumerate(C.hypotheses)], name="singles")
        order = rng.permutation(len(C.hypotheses))
        nested = Collection([ExplicitClass(C.hypotheses[order[:j]], name=f"n{j}") for j in range(1, len(order) + 1)],
                            name="nested")
        partial = Collection([_random_class(rng, N, int(rng.integers(1, 12)), 0.2, name=f"P{j}") for j in range(4)],
                             name="partial")
        m = int(rng.integers(0, N))
        mono = tau_of_m(partial, m).value <= tau_of_m(partial, m + 1).value
        checks = (one == 1, tau_of_set(singles, U) == pi, tau_of_set(nested, U) <= pi, mono)
        if not all(checks):
            bad.append((i, checks))
    per_a = tau_of_set(exponential_example(8, 3, sets=[(0, 1, 2)]), range(8))
    vc_union = vc_of_restriction(union_class(exponential_example(8, 3)), range(8))
    ok = not bad and per_a == 256 and vc_union <= 3
    return CheckResult("growth-properties", ok,
                       f"{n_instances} collections, {len(bad)} violations; exponential example tau={per_a}, vc(union)={vc_union}")


def check_srm_showdown(seeds=20, m=256, m_grid=(64, 256, 1024), delta=0.1, quick=False) -> CheckResult:
    from .experiments import showdown_trial

    seeds = 5 if quick else seeds
    medians = {}
    detail = []
    ok = True
    for mm in m_grid:
        inst = adversarial_instance(mm, delta)
        trials = [showdown_trial(inst, mm, s, delta) for s in range(seeds)]
        medians[mm] = statistics.median(t[1] for t in trials)
        if mm != m:
            continue
        srm_ok = all(abs(t[0] - 0.5) <= 1 / (inst.m0 + 1) for t in trials)
        wins = sum(t[1] < t[0] for t in trials)
        need = math.ceil(0.9 * seeds)
        ok &= srm_ok and wins >= need
        detail.append(f"m={m}: srm within 1/(m0+1) of 1/2 on all seeds={srm_ok}, collection better on {wins}/{seeds}")
    trend = all(medians[a] >= medians[b] for a, b in zip(m_grid, m_grid[1:]))
    ok &= trend
    detail.append(f"median collection error {medians}")
    return CheckResult("srm-showdown", ok, "; ".join(detail))


def check_trend(seeds=30, m_grid=(32, 128, 512), quick=False) -> CheckResult:
    from .experiments import trend_trial

    seeds = 5 if quick else seeds
    medians = {m: statistics.median(trend_trial(m, s)[2] for s in range(seeds)) for m in m_grid}
    ok = all(medians[a] >= medians[b] for a, b in zip(m_grid, m_grid[1:]))
    return CheckResult("excess-trend", ok, f"median excess over {seeds} seeds {medians}")


def check_packing_sandwich(n_spaces=50, seed=0, quick=False) -> CheckResult:
    from .experiments import random_metric

    rng = make_rng([seed, 9])
    n_spaces = _scale(n_spaces, quick)
    bad = []
    for i in range(n_spaces):
        N = int(rng.integers(2, 11))
        dom = random_metric(rng, N, integer=bool(i % 2))
        base = AllFunctionsClass(N)
        dists = np.unique(dom.metric[np.triu_indices(N, 1)])
        radii = sorted({0.0, float(dists[0]), float(np.median(dists)), float(dists[-1]),
                        float(rng.uniform(0, dists[-1]))})
        for r in radii:
            vd, pk = vc_at_distance(base, dom, r), max_packing_size(dom, r)
            vr, n2, n1 = vc_at_radius(base, dom, r), len(r_net(dom, 2 * r)), len(r_net(dom, r))
            if vd != pk or not n2 <= vr <= 2 * n1:
                bad.append((i, r, vd, pk, n2, vr, n1))
    return CheckResult("packing-sandwich", not bad, f"{n_spaces} spaces, {len(bad)} violations {bad[:3]}")


def check_margin(n_instances=200, n_tiny=30, seed=0, quick=False) -> CheckResult:
    rng = make_rng([seed, 10])
    n_instances, n_tiny = _scale(n_instances, quick), _scale(n_tiny, quick)
    bad = []
    for i in range(n_instances):
        N = int(rng.integers(2, 7))
        dom = Domain.from_coordinates(np.sort(rng.choice(12, size=N, replace=False)).astype(float))
        gamma = float(rng.choice([0.5, 1.0, 1.5, 2.0]))
        L = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        rows = rng.integers(-3, 4, size=(int(rng.integers(1, 25)), N)).astype(float)
        consts = np.array([[gamma] * N, [-gamma] * N])
        F = RealValuedClass(np.vstack([rows, consts]), name="F")
        n = int(rng.integers(1, 9))
        S = LabeledSample(rng.integers(0, N, size=n), rng.integers(0, 2, size=n))
        eg = err_gamma_class(F.lipschitz(L, dom.metric), S, gamma)
        et = err_class_sample(translated_class(F, L, gamma, dom), S)
        if not et <= eg:
            bad.append(("err", i, str(et), str(eg)))
    for i in range(n_tiny):
        N = int(rng.integers(1, 6))
        dom = Domain.from_coordinates(np.sort(rng.choice(9, size=N, replace=False)).astype(float))
        gamma = float(rng.choice([0.5, 1.0]))
        L = gamma * float(rng.choice([1, 2, 3]))
        levels = [gamma * j for j in range(-3, 4)]
        grid = RealValuedClass(np.array([[gamma * j] * N for j in range(-3, 4)] + [[gamma * (2 * b - 1) for b in bits]
                               for bits in np.ndindex(*([2] * N))]), name="G")
        vc = vc_of_restriction(translated_class(grid, L, gamma, dom), range(N))
        fat = fat_shattering_zero_witness(lipschitz_grid(dom, L, levels), gamma)
        if vc != fat:
            bad.append(("fat", i, vc, fat))
    return CheckResult("margin", not bad, f"{n_instances} error instances, {n_tiny} dimension instances, "
                                           f"{len(bad)} violations {bad[:3]}")


def check_heldout_gap(trials=500, m=512, J=(0, 1, 2), delta=0.1, seed=0, quick=False) -> CheckResult:
    """Fixed J: OIG vote on S_J per member, error on the rest of S against the exact error on D."""
    from .experiments import TREND, nested_windows, noisy_threshold

    trials = 50 if quick else trials
    col = nested_windows(TREND["N"], TREND["center"], TREND["widths"])
    D = noisy_threshold(TREND["N"], TREND["t_star"], TREND["noise"])
    rest_mask = np.ones(m, dtype=bool)
    rest_mask[list(J)] = False
    inside = 0
    worst = 0.0
    for t in range(trials):
        S = D.sample(m, make_rng([seed, 11, t]))
        tau_hat = tau_of_set(col, S.domain())
        bound = 4 * math.sqrt((math.log(tau_hat) + len(J) * math.log(m) + math.log(1 / delta)) / m)
        rest = S.subset(np.flatnonzero(rest_mask))
        cache = PredictionCache()
        gap = 0.0
        for cls in col:
            held = majority_predictions(cls, S, (tuple(J),), rest.points, cache)
            full = majority_predictions(cls, S, (tuple(J),), np.arange(TREND["N"]), cache)
            true = err_dist(Predictor.from_labels(full), D)
            gap = max(gap, abs(float(np.mean(held != rest.labels)) - true))
        worst = max(worst, gap)
        inside += gap <= bound
    ok = inside >= (1 - delta) * trials
    return CheckResult("heldout-gap", ok, f"{inside}/{trials} trials within the bound; largest gap {worst:.4f}")


DETERMINISM_CONFIGS = {
    "srm-showdown": dict(m=(64,), seeds=2),
    "end-to-end": dict(m=(32,), seeds=2),
    "tau-growth": dict(m=(2, 3), seeds=2, domain_size=5),
    "oig-loo": dict(seeds=2, trials=3),
    "boosting": dict(m=(16,), seeds=2, trials=2),
    "nn-sweep": dict(seeds=2, domain_size=6),
    "contrastive-sweep": dict(seeds=2, domain_size=6),
    "margin-sweep": dict(seeds=2, domain_size=5),
}


def check_determinism(quick=False) -> CheckResult:
    from .config import build_config
    from .experiments import run_experiment

    bad = []
    with tempfile.TemporaryDirectory() as tmp:
        for name, extra in DETERMINISM_CONFIGS.items():
            cfg = build_config(dict(extra, experiment=name))
            blobs = []
            for rep in range(2):
                path = os.path.join(tmp, f"{name}.{rep}.csv")
                run_experiment(cfg, path)
                with open(path, "rb") as fh:
                    blobs.append(fh.read())
            if blobs[0] != blobs[1]:
                bad.append(name)
    return CheckResult("determinism", not bad, f"{len(DETERMINISM_CONFIGS)} experiments run twice, differing: {bad}")


CHECKS = {
    "oig-loo": check_oig_loo,
    "orientation": check_orientation,
    "boosting": check_boosting,
    "hc-tau": check_hc_tau,
    "forbidden-tau": check_forbidden_tau,
    "growth-properties": check_growth_properties,
    "srm-showdown": check_srm_showdown,
    "excess-trend": check_trend,
    "packing-sandwich": check_packing_sandwich,
    "margin": check_margin,
    "heldout-gap": check_heldout_gap,
    "determinism": check_determinism,
}


def run_all(quick=False, names=None, report=print) -> list:
    results = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        res = fn(quick=quick)
        report(res.line())
        results.append(res)
    return results
