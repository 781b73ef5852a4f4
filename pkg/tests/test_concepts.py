from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collearn.concepts import (
    STAR,
    AllFunctionsClass,
    Domain,
    ExplicitClass,
    FiniteDistribution,
    LabeledSample,
    Predictor,
    err_class_dist,
    err_class_sample,
    err_dist,
    err_sample,
    err_star_estimate,
    make_rng,
    phi_sparseness,
    psi_lipschitz,
    read_class_file,
    read_distribution_csv,
    read_matrix_csv,
    restrict,
    vc_dist_estimate,
    vc_of_restriction,
    write_class_file,
    write_distribution_csv,
    write_matrix_csv,
)
from collearn.errors import InputError, ResourceError
from collearn.experiments import thresholds


def brute_vc(H, U):
    """Largest T within U on which the rows total on T show all patterns."""
    best = 0
    for r in range(1, len(U) + 1):
        for T in combinations(U, r):
            sub = H[:, list(T)]
            pats = {tuple(row) for row in sub.tolist() if STAR not in row}
            if len(pats) == 2 ** r:
                best = r
    return best


partial_classes = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.sampled_from([0, 1, STAR]), min_size=n, max_size=n), min_size=1, max_size=12)
)


def test_thresholds_restrict_example():
    H = thresholds(3)
    assert H.hypotheses.shape[0] == 4
    rows = restrict(H, [0, 2])
    assert {tuple(r) for r in rows.tolist()} == {(1, 1), (0, 1), (0, 0)}


def test_restrict_drops_partial_traces():
    H = ExplicitClass([[1, STAR, 0]])
    assert restrict(H, [0, 1]).shape[0] == 0
    assert restrict(H, []).shape == (1, 0)


def test_err_sample_examples():
    S = LabeledSample.from_pairs([(0, 1), (1, 1), (2, 1)])
    assert err_sample([1, 0, 1], S) == Fraction(1, 3)
    assert err_sample([1, 1, 1], S) == 0
    assert err_sample([STAR] * 3, S) == 1
    with pytest.raises(InputError):
        err_sample([1], LabeledSample.from_pairs([]))


def test_err_dist_examples():
    D = FiniteDistribution([(0, 0, 0.5), (0, 1, 0.5)])
    assert err_dist([1], D) == 0.5
    D2 = FiniteDistribution.uniform_labelled([0, 1, 2], [1, 0, 1])
    assert err_dist([1, 0, 1], D2) == 0


def test_all_functions_error_is_bayes_minimum():
    rng = make_rng(3)
    q = rng.random(8)
    q /= q.sum()
    D = FiniteDistribution([(i // 2, i % 2, float(v)) for i, v in enumerate(q)])
    p0, p1 = D.mass_by_label(range(4))
    want = float(np.minimum(p0, p1).sum())
    assert err_class_dist(AllFunctionsClass(4), D) == pytest.approx(want, abs=1e-12)
    full = ExplicitClass(np.array(list(product([0, 1], repeat=4))))
    assert err_class_dist(full, D) == pytest.approx(want, abs=1e-12)


def test_vc_examples():
    assert vc_of_restriction(thresholds(5), range(5)) == 1
    assert vc_of_restriction(AllFunctionsClass(3), range(3)) == 3
    rep = vc_of_restriction(ExplicitClass([[STAR, STAR]]), [0, 1], detailed=True)
    assert rep.vc == 0 and not rep.has_total_behaviour
    rep = vc_of_restriction(thresholds(2), [0, 1], detailed=True)
    assert rep.vc == 1 and rep.has_total_behaviour


def test_vc_cap_raises():
    with pytest.raises(ResourceError):
        vc_of_restriction(AllFunctionsClass(6), range(6), cap=3)


@settings(max_examples=80, deadline=None)
@given(partial_classes)
def test_vc_matches_brute_force(rows):
    H = ExplicitClass(rows)
    U = range(H.domain_size)
    assert vc_of_restriction(H, U) == brute_vc(H.hypotheses, list(U))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.sampled_from([0, 1]), min_size=n, max_size=n),
                                                     min_size=1, max_size=12)))
def test_total_restriction_is_projection(rows):
    H = ExplicitClass(rows)
    N = H.domain_size
    full = restrict(H, range(N))
    for r in range(N + 1):
        for T in combinations(range(N), r):
            proj = {tuple(b) for b in full[:, list(T)].tolist()}
            assert {tuple(b) for b in restrict(H, T).tolist()} == proj


@settings(max_examples=60, deadline=None)
@given(partial_classes, st.integers(0, 2 ** 20))
def test_err_class_sample_matches_member_minimum(rows, seed):
    H = ExplicitClass(rows)
    rng = make_rng(seed)
    S = LabeledSample(rng.integers(0, H.domain_size, size=6), rng.integers(0, 2, size=6))
    want = min(err_sample(h, S) for h in H.hypotheses)
    assert err_class_sample(H, S) == want


def test_partial_class_error_through_restrictions():
    # an intensional wrapper forces the subset-enumeration path
    from collearn.groupings import ClusterConstraint, IntensionalClass

    H = ExplicitClass([[0, 1, STAR], [1, 1, 1], [STAR, 0, 0]])
    ic = IntensionalClass(H, ClusterConstraint([0, 1, 2]))
    S = LabeledSample.from_pairs([(0, 0), (1, 0), (2, 0), (2, 0)])
    assert err_class_sample(ic, S) == err_class_sample(H, S) == Fraction(1, 4)


def test_sample_is_reproducible_and_point_mass():
    D = FiniteDistribution([(3, 1, 1.0)])
    S = D.sample(5, 0)
    assert S.pairs() == [(3, 1)] * 5
    D2 = FiniteDistribution.uniform_labelled([0, 1, 2], [0, 1, 0])
    assert D2.sample(50, 7).pairs() == D2.sample(50, 7).pairs()


def test_sample_frequencies_converge():
    D = FiniteDistribution([(0, 0, 0.1), (0, 1, 0.2), (1, 1, 0.3), (2, 0, 0.4)])
    m = 100_000
    S = D.sample(m, 11)
    for p, y, q in D.atoms():
        freq = np.mean((S.points == p) & (S.labels == y))
        assert abs(freq - q) <= 3 / np.sqrt(m)


def test_vc_dist_estimate_examples():
    D = FiniteDistribution.uniform_labelled([0, 1], [0, 1])
    assert vc_dist_estimate(thresholds(4), D, 5, 0.1, trials=50, rng=0) <= 1
    single = ExplicitClass([[0, 1, 1, 0]])
    assert vc_dist_estimate(single, D, 5, 0.1, trials=50, rng=0) == 0


def test_err_star_estimate():
    H = thresholds(4)
    D = FiniteDistribution.uniform_labelled([0, 1, 2, 3], [0, 0, 1, 1])
    assert err_star_estimate(H, D, 5, trials=30, rng=1) == 0
    assert err_star_estimate(ExplicitClass([[STAR] * 4]), D, 5, trials=10, rng=1) == 1
    noisy = FiniteDistribution.from_eta([0.25] * 4, [0.3, 0.3, 0.7, 0.7])
    est = err_star_estimate(H, noisy, 10, trials=400, rng=2)
    assert est <= err_class_dist(H, noisy) + 2 / np.sqrt(400)


def test_phi_and_psi_examples():
    D = FiniteDistribution.uniform_labelled([0, 1], [0, 1])
    assert phi_sparseness(D, 0.4) == 0
    half = FiniteDistribution.from_eta([0.5, 0.5], [0.5, 0.5])
    assert phi_sparseness(half, 0.0) == 1
    metric = np.array([[0, 1], [1, 0]], dtype=float)
    assert psi_lipschitz(D, 2, metric) == 0
    assert psi_lipschitz(D, 0.5, metric) == 1
    assert psi_lipschitz(D, 0.5, metric, form="pairwise") == 0.5


def test_predictor_lazy_and_validation():
    calls = []

    def fn(pts):
        calls.append(len(pts))
        return pts % 2

    p = Predictor(6, fn=fn)
    assert p.predict([1, 3, 3]).tolist() == [1, 1, 1]
    assert p.predict([1, 2]).tolist() == [1, 0]
    assert calls == [2, 1]
    with pytest.raises(InputError):
        Predictor(3)
    with pytest.raises(InputError):
        Predictor.from_labels([0, 2, 1])


def test_input_validation():
    with pytest.raises(InputError):
        ExplicitClass([[0, 3]])
    with pytest.raises(InputError):
        FiniteDistribution([(0, 1, 0.5)])
    with pytest.raises(InputError):
        LabeledSample([0, 1], [0])
    with pytest.raises(InputError):
        Domain(2, metric=[[0, 1], [1, 1]])


def test_class_file_round_trip(tmp_path):
    H = ExplicitClass([[0, 1, STAR], [1, 1, 0]], name="H")
    path = tmp_path / "h.txt"
    write_class_file(H, path)
    assert path.read_text() == "01*\n110\n"
    assert np.array_equal(read_class_file(path).hypotheses, H.hypotheses)
    (tmp_path / "bad.txt").write_text("01\n011\n")
    with pytest.raises(InputError, match=":2:"):
        read_class_file(tmp_path / "bad.txt")


def test_matrix_and_distribution_files(tmp_path):
    M = np.array([[0, 1.5], [1.5, 0]])
    write_matrix_csv(M, tmp_path / "m.csv")
    assert np.array_equal(read_matrix_csv(tmp_path / "m.csv"), M)
    D = FiniteDistribution([(0, 1, 0.25), (2, 0, 0.75)])
    write_distribution_csv(D, tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "point,label,prob"
    assert read_distribution_csv(tmp_path / "d.csv").atoms() == D.atoms()
    (tmp_path / "x.csv").write_text("0,1\n")
    with pytest.raises(InputError):
        read_distribution_csv(tmp_path / "x.csv")
