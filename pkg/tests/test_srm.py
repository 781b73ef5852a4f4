import math
from itertools import combinations

import numpy as np
import pytest

from collearn.concepts import (
    ExplicitClass,
    LabeledSample,
    err_dist,
    err_sample,
    vc_dist_estimate,
    vc_of_restriction,
)
from collearn.errors import InputError
from collearn.growth import Collection, tau_dist_estimate, tau_of_set
from collearn.learner import collection_learn
from collearn.srm import (
    BlockCubeClass,
    WeightedCollection,
    adversarial_instance,
    block,
    srm_learn,
    srm_penalty,
    threshold_w0,
    zero_block,
)


def brute_vc(H):
    best = 0
    N = H.shape[1]
    for r in range(1, N + 1):
        found = False
        for T in combinations(range(N), r):
            if len({tuple(x) for x in H[:, list(T)].tolist()}) == 2 ** r:
                found = True
                break
        if not found:
            break
        best = r
    return best


def test_blocks():
    assert list(block(1)) == [0]
    assert list(block(3)) == [6, 7, 8]
    assert list(zero_block(3)) == [9, 10]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_block_cube_vc_brute_force(n):
    N = n * n + (n + 1) // 2 + 2
    cls = BlockCubeClass(n, N)
    H = cls.explicit().hypotheses
    assert H.shape[0] == 2 ** n + 1
    assert brute_vc(H) == n == vc_of_restriction(cls, range(N))


def test_block_cube_restrict_matches_explicit():
    cls = BlockCubeClass(3, 14)
    ex = cls.explicit()
    rng = np.random.default_rng(0)
    for _ in range(30):
        U = sorted(rng.choice(14, size=int(rng.integers(0, 8)), replace=False).tolist())
        assert np.array_equal(cls.restrict(U), ex.restrict(U))
        assert vc_of_restriction(cls, U) == vc_of_restriction(ex, U)


def test_srm_single_class_is_penalised_erm():
    H = ExplicitClass([[0, 0, 1], [1, 1, 0], [0, 1, 1]], name="H")
    wc = WeightedCollection(Collection([H]), [1.0])
    S = LabeledSample.from_pairs([(0, 0), (1, 1), (2, 1), (1, 1)])
    pred, rows, best = srm_learn(wc, S, 0.1)
    assert err_sample(pred, S) == min(err_sample(h, S) for h in H.hypotheses) == 0
    assert rows[best].penalty == pytest.approx(srm_penalty(vc_of_restriction(H, range(3)), 1.0, 4, 0.1))


def test_srm_charges_first_class():
    h = [[0, 1, 1]]
    A = ExplicitClass(h + [[1, 1, 1]], name="A")
    B = ExplicitClass(h, name="B")
    wc = WeightedCollection(Collection([A, B]), [0.9, 0.1])
    S = LabeledSample.from_pairs([(0, 0), (1, 1)])
    _, rows, best = srm_learn(wc, S, 0.1)
    assert rows[best].class_name == "A"
    assert all(r.member == 0 for r in rows if r.hypothesis == (0, 1, 1))


def test_weighted_collection_validation():
    H = ExplicitClass([[0, 1]], name="H")
    with pytest.raises(InputError):
        WeightedCollection(Collection([H]), [1.5])
    with pytest.raises(InputError):
        WeightedCollection(Collection([H]), [0.0])


@pytest.mark.parametrize("m,w0,m0,N", [(64, 53, 77, 6162), (256, 127, 184, 34410), (1024, 371, 536, 288906)])
def test_adversarial_constants(m, w0, m0, N):
    inst = adversarial_instance(m, 0.1)
    assert (inst.w0, inst.m0, inst.domain_size) == (w0, m0, N)
    assert math.sqrt(w0 / m) > 0.5 + math.sqrt(math.log(10) / m) + math.sqrt((math.log(2) + math.log(10)) / m)
    assert not math.sqrt((w0 - 1) / m) > 0.5 + math.sqrt(math.log(10) / m) + math.sqrt((math.log(2) + math.log(10)) / m)
    assert -math.log(2.0 ** -m0) >= w0 > -math.log(2.0 ** -(m0 - 1))
    assert threshold_w0(m, 0.1, math.log(2)) == w0


def competitor_errors(inst):
    """Exact error on D of every behaviour the union shows on the support, except the target."""
    pts = list(inst.support)
    target = inst.collection[inst.m0 - 1].special()[pts]
    p0, p1 = inst.D.mass_by_label(pts)
    errs = set()
    for cls in inst.collection:
        for b in cls.restrict(pts):
            if np.array_equal(b, target):
                continue
            errs.add(float(((b != 0) * p0).sum() + ((b != 1) * p1).sum()))
    return errs


@pytest.mark.parametrize("m", [64, 256])
def test_every_competitor_is_near_half(m):
    inst = adversarial_instance(m, 0.1)
    errs = competitor_errors(inst)
    half = math.ceil(inst.m0 / 2)
    assert min(errs) == pytest.approx(half / (inst.m0 + 1))
    assert all(abs(e - 0.5) <= 1 / (inst.m0 + 1) + 1e-12 for e in errs)


def test_showdown_m256_exact_values():
    inst = adversarial_instance(256, 0.1)
    assert len(inst.support) == inst.m0 + 1 == 185
    S = inst.D.sample(256, 0)
    p_srm, _, _ = srm_learn(inst.weighted, S, 0.1)
    assert err_dist(p_srm, inst.D) == pytest.approx(92 / 185)
    p_col, ledger = collection_learn(inst.collection, S, 0.1, seed=0)
    assert p_col.provenance["class"] == f"H{inst.m0}"
    assert err_dist(p_col, inst.D) == 0
    assert ledger.tau_hat == 3


def test_showdown_m64_srm_error_is_half():
    inst = adversarial_instance(64, 0.1)
    for seed in range(3):
        S = inst.D.sample(64, seed)
        pred, _, _ = srm_learn(inst.weighted, S, 0.1)
        assert err_dist(pred, inst.D) == 0.5
        target = inst.collection[inst.m0 - 1].special()
        assert not np.array_equal(pred.predict(list(inst.support)), target[list(inst.support)])


def test_adversarial_growth_and_vc_on_support():
    """On the support the union shows three kinds of class: all-ones only, all-ones plus the target
    (class m0), and all-ones plus its flip on the last support point (class m0 + 1)."""
    inst = adversarial_instance(64, 0.1)
    assert tau_of_set(inst.collection, inst.support) == 3
    assert tau_dist_estimate(inst.collection, inst.D, 64, 0.1, trials=20, rng=0) == 3
    target_class = inst.collection[inst.m0 - 1]
    assert vc_of_restriction(target_class, inst.support) == 1
    assert vc_dist_estimate(target_class, inst.D, 64, 0.1, trials=20, rng=0) == 1


def test_pair_support_option():
    inst = adversarial_instance(64, 0.1, support="pair")
    assert len(inst.support) == inst.m0
    assert tau_of_set(inst.collection, inst.support) == 2
    S = inst.D.sample(64, 1)
    pred, _, _ = srm_learn(inst.weighted, S, 0.1)
    assert err_dist(pred, inst.D) == pytest.approx(math.ceil(inst.m0 / 2) / inst.m0)
    with pytest.raises(InputError):
        adversarial_instance(64, 0.1, support="other")
    with pytest.raises(InputError):
        adversarial_instance(64, 0.1, N_trunc=100)


def test_explicit_srm_agrees_with_block_cube_rows():
    """Small instance: analytic per-class rows pick a hypothesis with the same score as brute force."""
    n_classes, N = 4, 4 * 4 + 2 + 2
    cubes = [BlockCubeClass(n, N) for n in range(1, n_classes + 1)]
    w = [2.0 ** -n for n in range(1, n_classes + 1)]
    explicit = [c.explicit() for c in cubes]
    rng = np.random.default_rng(3)
    for _ in range(10):
        S = LabeledSample(rng.integers(0, N, size=12), rng.integers(0, 2, size=12))
        _, rows_a, ba = srm_learn(WeightedCollection(Collection(cubes), w), S, 0.1)
        _, rows_b, bb = srm_learn(WeightedCollection(Collection(explicit), w), S, 0.1)
        assert rows_a[ba].score == pytest.approx(rows_b[bb].score)
        assert rows_a[ba].emp_err == rows_b[bb].emp_err
