"""Acceptance suite: each criterion at full size, one PASS/FAIL line per criterion.

The lines are printed outside pytest's capture so they show up in a plain
``pytest -v`` run. The same checks back ``collearn verify-invariants``.
"""
import pytest

from collearn import invariants as inv

CRITERIA = [
    ("1-oig-loo", lambda: inv.check_oig_loo(n_instances=200)),
    ("2-orientation", lambda: inv.check_orientation(n_graphs=100, max_edges=12)),
    ("3-boosting", lambda: inv.check_boosting(n_instances=100)),
    ("4-hierarchical-tau", lambda: inv.check_hc_tau(n_instances=100)),
    ("5-forbidden-tau", lambda: inv.check_forbidden_tau(n_instances=100)),
    ("6-growth-properties", lambda: inv.check_growth_properties(n_instances=200)),
    ("7-srm-showdown", lambda: inv.check_srm_showdown(seeds=20, m=256, m_grid=(64, 256, 1024), delta=0.1)),
    ("8-excess-trend", lambda: inv.check_trend(seeds=30, m_grid=(32, 128, 512))),
    ("9-packing-sandwich", lambda: inv.check_packing_sandwich(n_spaces=50)),
    ("10-margin", lambda: inv.check_margin(n_instances=200, n_tiny=30)),
    ("11-heldout-gap", lambda: inv.check_heldout_gap(trials=500, m=512, delta=0.1)),
    ("12-determinism", lambda: inv.check_determinism()),
]


@pytest.mark.parametrize("label,run", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(label, run, capsys):
    res = run()
    with capsys.disabled():
        print(f"\n{label} {res.line()}")
    assert res.passed, res.detail
