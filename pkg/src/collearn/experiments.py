"""Seeded instance generators and the experiment runners behind ``collearn run``.

Every runner returns ``(columns, rows)`` with rows sorted by seed, so a run is
reproducible byte for byte from its config.
"""
from __future__ import annotations

import csv
import math
import re
import time
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import __version__
from .concepts import (
    AllFunctionsClass,
    Domain,
    ExplicitClass,
    FiniteDistribution,
    LabeledSample,
    err_class_dist,
    err_class_sample,
    err_dist,
    make_rng,
    vc_of_restriction,
)
from .errors import InputError
from .groupings import (
    HierarchicalClustering,
    RealValuedClass,
    contrastive_spec,
    err_gamma_class,
    forbidden_collection,
    hc_collection,
    r_net,
    similarity_spec,
    translated_class,
    vc_at_distance,
    vc_at_radius,
)
from .growth import Collection, tau_of_set
from .learner import (
    PredictionCache,
    boost,
    boosting_rounds,
    collection_learn,
    majority_predictions,
    theorem_bound,
)
from .oig import loo_error
from .srm import adversarial_instance, srm_learn


# ---------------------------------------------------------------- generators

def thresholds(N, name="thresholds", ts=None) -> ExplicitClass:
    """h_t(i) = 1 iff i >= t, for t in ``ts`` (default 0..N)."""
    ts = range(N + 1) if ts is None else ts
    return ExplicitClass([[1 if i >= t else 0 for i in range(N)] for t in ts], name=name)


def random_class(rng, N, size, star_prob=0.0, name="H") -> ExplicitClass:
    H = rng.integers(0, 2, size=(size, N)).astype(np.uint8)
    if star_prob > 0:
        H[rng.random(H.shape) < star_prob] = 2
    return ExplicitClass(H, name=name)


def realizable_sample(rng, cls: ExplicitClass, n, total=True) -> LabeledSample:
    """Sample n points and label them by a random member that is defined on all of them."""
    N = cls.domain_size
    for _ in range(1000):
        pts = rng.integers(0, N, size=n)
        H = cls.hypotheses[:, pts]
        ok = np.flatnonzero(np.all(H != 2, axis=1))
        if len(ok):
            h = H[ok[rng.integers(len(ok))]]
            return LabeledSample(pts, h)
    raise InputError("could not draw a realizable sample")


def random_weights(rng, n, decimals=1) -> Domain:
    W = np.triu(np.round(rng.random((n, n)), decimals), 1)
    return Domain(n, weights=W + W.T)


def random_metric(rng, n, integer=False) -> Domain:
    if integer:
        coords = rng.integers(0, 6, size=(n, 2)).astype(float)
        coords += np.arange(n)[:, None] * 1e-3  # keep points distinct
    else:
        coords = np.round(rng.random((n, 2)) * 4, 2)
    return Domain.from_coordinates(coords)


def nested_windows(N, center, widths, name="win") -> Collection:
    """Threshold classes with t in [center - j, center + j], nested in j."""
    members = [thresholds(N, name=f"{name}{j}", ts=range(max(0, center - j), min(N, center + j) + 1)) for j in widths]
    return Collection(members, name=f"{name}({N})")


def noisy_threshold(N, t_star, noise) -> FiniteDistribution:
    eta = [1 - noise if i >= t_star else noise for i in range(N)]
    return FiniteDistribution.from_eta([1.0 / N] * N, eta)


def weight_rule(name):
    match = re.fullmatch(r"power(\d+(?:\.\d+)?)", name)
    if not match:
        raise InputError(f"unknown weight rule {name!r}; expected power<base>")
    base = float(match.group(1))
    if base <= 1:
        raise InputError("weight base must exceed 1")
    return lambda n: base ** -n


# ---------------------------------------------------------------- trials

def showdown_trial(inst, m, seed, delta=0.1, c_prime=1.0, tau_mode="sample"):
    S = inst.D.sample(m, make_rng([seed, m]))
    p_srm, _, _ = srm_learn(inst.weighted, S, delta)
    p_col, ledger = collection_learn(inst.collection, S, delta, c_prime=c_prime, tau_mode=tau_mode, seed=seed)
    return err_dist(p_srm, inst.D), err_dist(p_col, inst.D), ledger.tau_hat, p_col.provenance["class"]


TREND = dict(N=16, center=4, widths=tuple(range(0, 13, 2)), t_star=12, noise=0.3)


def trend_trial(m, seed, delta=0.1, c_prime=1.0, **kw):
    """Excess error of the learner over the best class on a noisy threshold problem."""
    p = dict(TREND, **kw)
    col = nested_windows(p["N"], p["center"], p["widths"])
    D = noisy_threshold(p["N"], p["t_star"], p["noise"])
    S = D.sample(m, make_rng([seed, m]))
    pred, _ = collection_learn(col, S, delta, c_prime=c_prime, seed=seed)
    best = min(err_class_dist(c, D) for c in col)
    err = err_dist(pred, D)
    return err, best, round(err - best, 12), pred.provenance["class"]


# ---------------------------------------------------------------- runners

def _seeds(cfg):
    return [cfg["seed"] + s for s in range(cfg["seeds"])]


def run_srm_showdown(cfg):
    cols = ["seed", "m", "delta", "srm_err", "collection_err", "m0", "tau_hat"]
    rows = []
    rule = weight_rule(cfg["weight_rule"])
    for m in cfg["m"]:
        inst = adversarial_instance(m, cfg["delta"], rule, support=cfg["support"])
        for seed in _seeds(cfg):
            srm_err, col_err, tau_hat, _ = showdown_trial(inst, m, seed, cfg["delta"], cfg["c_prime"], cfg["tau_mode"])
            rows.append(dict(seed=seed, m=m, delta=cfg["delta"], srm_err=srm_err, collection_err=col_err,
                             m0=inst.m0, tau_hat=tau_hat))
    return cols, rows


def run_end_to_end(cfg):
    cols = ["seed", "m", "delta", "noise", "learner_err", "best_class_err", "excess", "selected"]
    rows = []
    for m in cfg["m"]:
        for seed in _seeds(cfg):
            err, best, excess, name = trend_trial(m, seed, cfg["delta"], cfg["c_prime"], noise=cfg["noise"])
            rows.append(dict(seed=seed, m=m, delta=cfg["delta"], noise=cfg["noise"], learner_err=err,
                             best_class_err=best, excess=excess, selected=name))
    return cols, rows


def run_tau_growth(cfg):
    cols = ["seed", "m", "family", "tau", "bound"]
    rows = []
    N = cfg["domain_size"]
    for seed in _seeds(cfg):
        rng = make_rng(seed)
        base = AllFunctionsClass(N)
        hc = hc_collection(base, HierarchicalClustering.random(N, rng))
        spec = similarity_spec(random_weights(rng, N))
        for m in cfg["m"]:
            if m > N:
                raise InputError(f"m={m} exceeds domain_size={N}")
            best_hc = best_fb = 0
            for U in combinations(range(N), m):
                best_hc = max(best_hc, tau_of_set(hc, U, cap=cfg["tau_cap"]))
                best_fb = max(best_fb, tau_of_set(forbidden_collection(base, spec, U), U, cap=cfg["tau_cap"]))
            rows.append(dict(seed=seed, m=m, family="hierarchical", tau=best_hc, bound=m))
            rows.append(dict(seed=seed, m=m, family="similarity", tau=best_fb, bound=math.comb(m, 2) + 1))
    return cols, rows


def run_oig_loo(cfg):
    cols = ["seed", "trial", "n", "vc", "loo_error", "bound", "holds"]
    rows = []
    N = cfg["domain_size"]
    for seed in _seeds(cfg):
        rng = make_rng(seed)
        for trial in range(cfg["trials"]):
            cls = random_class(rng, N, int(rng.integers(2, 60)))
            n = int(rng.integers(1, 11))
            S = realizable_sample(rng, cls, n)
            res = loo_error(cls, S)
            rows.append(dict(seed=seed, trial=trial, n=n, vc=res.vc, loo_error=str(res.error),
                             bound=str(res.bound), holds=int(res.error <= res.bound)))
    return cols, rows


def run_boosting(cfg):
    cols = ["seed", "trial", "m", "k", "rounds", "J_len", "T_bound", "correct"]
    rows = []
    N = cfg["domain_size"]
    for seed in _seeds(cfg):
        rng = make_rng(seed)
        for m in cfg["m"]:
            for trial in range(cfg["trials"]):
                cls = random_class(rng, N, int(rng.integers(2, 30)))
                S = realizable_sample(rng, cls, m)
                k = max(1, 3 * vc_of_restriction(cls, S.domain()))
                cache = PredictionCache()
                c = boost(cls, S, k, rng=rng, cache=cache)
                ok = np.all(majority_predictions(cls, S, c.blocks, S.points, cache) == S.labels)
                rows.append(dict(seed=seed, trial=trial, m=m, k=k, rounds=c.T, J_len=len(c.J),
                                 T_bound=boosting_rounds(m), correct=int(ok)))
    return cols, rows


def run_nn_sweep(cfg):
    from .invariants import max_packing_size

    cols = ["seed", "r", "vc_at_distance", "max_packing", "net_size"]
    rows = []
    N = cfg["domain_size"]
    for seed in _seeds(cfg):
        dom = random_metric(make_rng(seed), N)
        base = AllFunctionsClass(N)
        for r in cfg["r"]:
            rows.append(dict(seed=seed, r=r, vc_at_distance=vc_at_distance(base, dom, r),
                             max_packing=max_packing_size(dom, r), net_size=len(r_net(dom, r))))
    return cols, rows


def run_contrastive_sweep(cfg):
    cols = ["seed", "r", "vc_at_radius", "net_2r", "net_r", "sandwich", "tau", "breakpoints"]
    rows = []
    N = cfg["domain_size"]
    for seed in _seeds(cfg):
        rng = make_rng(seed)
        dom = random_metric(rng, N)
        base = AllFunctionsClass(N)
        spec = contrastive_spec(dom)
        U = tuple(sorted(rng.choice(N, size=min(N, 5), replace=False).tolist()))
        fam = forbidden_collection(base, spec, U)
        tau = tau_of_set(fam, U, cap=cfg["tau_cap"])
        for r in cfg["r"]:
            v = vc_at_radius(base, dom, r)
            n2, n1 = len(r_net(dom, 2 * r)), len(r_net(dom, r))
            rows.append(dict(seed=seed, r=r, vc_at_radius=v, net_2r=n2, net_r=n1,
                             sandwich=int(n2 <= v <= 2 * n1), tau=tau, breakpoints=len(fam)))
    return cols, rows


def run_margin_sweep(cfg):
    cols = ["seed", "gamma", "L", "err_translated", "err_gamma", "holds"]
    rows = []
    N = min(cfg["domain_size"], 6)
    for seed in _seeds(cfg):
        rng = make_rng(seed)
        dom = Domain.from_coordinates(np.arange(N, dtype=float))
        F = RealValuedClass(rng.integers(-3, 4, size=(30, N)).astype(float), name="F")
        S = LabeledSample(rng.integers(0, N, size=8), rng.integers(0, 2, size=8))
        for gamma in cfg["gamma"]:
            for L in cfg["lipschitz"]:
                FL = F.lipschitz(L, dom.metric)
                eg = err_gamma_class(FL, S, gamma) if len(FL.functions) else Fraction(1)
                et = err_class_sample(translated_class(F, L, gamma, dom), S)
                rows.append(dict(seed=seed, gamma=gamma, L=L, err_translated=str(et), err_gamma=str(eg),
                                 holds=int(et <= eg)))
    return cols, rows


RUNNERS = {
    "srm-showdown": run_srm_showdown,
    "tau-growth": run_tau_growth,
    "oig-loo": run_oig_loo,
    "boosting": run_boosting,
    "nn-sweep": run_nn_sweep,
    "contrastive-sweep": run_contrastive_sweep,
    "margin-sweep": run_margin_sweep,
    "end-to-end": run_end_to_end,
}


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, cols, rows):
    rows = sorted(rows, key=lambda r: r["seed"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r[c]) for c in cols])


def run_experiment(cfg, output=None):
    """Run the configured experiment, write its CSV and a ``.meta`` file; returns the CSV path."""
    start = time.perf_counter()
    cols, rows = RUNNERS[cfg.experiment](cfg)
    path = output or cfg["output"]
    write_csv(path, cols, rows)
    with open(str(path) + ".meta", "w") as fh:
        fh.write(f"version = {__version__}\n")
        fh.write(f"config_digest = {cfg.digest()}\n")
        fh.write(f"wall_time_s = {time.perf_counter() - start:.3f}\n")
    return path


def emit_bound_curves(m_grid, vc=0, tau=1, delta=0.1, C=1.0, ks=()):
    """Rows of the collection bound over ``m_grid`` and, per k, the forbidden-family variant."""
    cols = ["m", "theorem_bound"] + [f"forbidden_k{k}" for k in ks]
    rows = []
    for m in m_grid:
        row = {"m": m, "theorem_bound": theorem_bound(vc, tau, m, delta, C)}
        for k in ks:
            row[f"forbidden_k{k}"] = forbidden_bound(vc, k, m, delta, C)
        rows.append(row)
    return cols, rows


def forbidden_bound(vc, k, m, delta, C=1.0):
    return C * math.sqrt(((vc + k) * math.log(m) ** 2 + math.log(1 / delta)) / m)
