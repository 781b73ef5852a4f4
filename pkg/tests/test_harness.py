import csv
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collearn.cli import main
from collearn.config import SCHEMA, build_config, parse_config
from collearn.errors import InputError
from collearn.experiments import emit_bound_curves, forbidden_bound, run_experiment, weight_rule
from collearn.learner import theorem_bound


def test_config_round_trip():
    cfg = parse_config("experiment = end-to-end\nm = 16,32\ndelta = 0.05\n# comment\n\nseeds = 2\n")
    assert cfg["m"] == (16, 32) and cfg["delta"] == 0.05 and cfg["output"] == "end-to-end.csv"
    again = parse_config(cfg.serialize())
    assert again == cfg and again.digest() == cfg.digest()


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(sorted(SCHEMA["experiment"].choices)),
    st.lists(st.integers(1, 5000), min_size=1, max_size=4),
    st.floats(1e-6, 0.999),
    st.integers(1, 50),
    st.lists(st.floats(0.01, 100, allow_nan=False), min_size=1, max_size=3),
)
def test_config_round_trip_random(exp, ms, delta, seeds, rs):
    cfg = build_config(dict(experiment=exp, m=tuple(ms), delta=delta, seeds=seeds, r=tuple(rs)))
    assert parse_config(cfg.serialize()) == cfg


def test_config_errors_are_line_precise():
    with pytest.raises(InputError, match=r"cfg:2: unknown key 'mm'"):
        parse_config("experiment = boosting\nmm = 3\n", "cfg")
    with pytest.raises(InputError, match=r"cfg:3: duplicate key 'seed'"):
        parse_config("experiment = boosting\nseed = 1\nseed = 2\n", "cfg")
    with pytest.raises(InputError, match=r"cfg:1: cannot read"):
        parse_config("seeds = many\n", "cfg")
    with pytest.raises(InputError, match=r"cfg:1: expected"):
        parse_config("just words\n", "cfg")
    with pytest.raises(InputError, match="missing required key"):
        parse_config("seed = 1\n", "cfg")
    with pytest.raises(InputError, match="must be one of"):
        parse_config("experiment = plot\n", "cfg")
    with pytest.raises(InputError):
        build_config(dict(experiment="boosting", delta=1.5))


def test_weight_rule():
    assert weight_rule("power2")(3) == 0.125
    assert weight_rule("power1.5")(2) == pytest.approx(1 / 2.25)
    for bad in ("uniform", "power1", "power0.5"):
        with pytest.raises(InputError):
            weight_rule(bad)


def test_run_writes_csv_and_meta(tmp_path, capsys):
    conf = tmp_path / "e.conf"
    out = tmp_path / "out.csv"
    conf.write_text(f"experiment = oig-loo\nseeds = 2\ntrials = 3\ndomain_size = 6\noutput = {out}\n")
    assert main(["run", str(conf)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 6 and {r["seed"] for r in rows} == {"0", "1"}
    assert all(r["holds"] == "1" for r in rows)
    meta = dict(line.split(" = ") for line in (tmp_path / "out.csv.meta").read_text().splitlines())
    assert set(meta) == {"version", "config_digest", "wall_time_s"}
    assert meta["config_digest"] == parse_config(conf.read_text()).digest()
    first = out.read_bytes()
    assert main(["run", str(conf)]) == 0
    assert out.read_bytes() == first


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.conf"
    bad.write_text("experiment = boosting\nfoo = 1\n")
    assert main(["run", str(bad)]) == 2
    assert f"{bad}:2" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.conf")]) == 2
    # m larger than the domain cannot be enumerated
    cap = tmp_path / "cap.conf"
    cap.write_text(f"experiment = tau-growth\nm = 9\ndomain_size = 4\noutput = {tmp_path / 'c.csv'}\n")
    assert main(["run", str(cap)]) == 2
    assert main(["verify-invariants", "--only", "nope"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--m-grid", "x"])
    assert info.value.code == 2


def test_resource_exit_code(tmp_path, capsys, monkeypatch):
    from collearn import experiments
    from collearn.errors import ResourceError

    def boom(cfg):
        raise ResourceError("vc cap exceeded")

    monkeypatch.setitem(experiments.RUNNERS, "boosting", boom)
    conf = tmp_path / "r.conf"
    conf.write_text("experiment = boosting\n")
    assert main(["run", str(conf)]) == 3


def test_invariant_exit_code(monkeypatch, capsys):
    from collearn import invariants

    monkeypatch.setitem(invariants.CHECKS, "oig-loo", lambda quick=False: invariants.CheckResult("oig-loo", False, "x"))
    assert main(["verify-invariants", "--only", "oig-loo"]) == 4


def test_verify_invariants_quick(capsys):
    assert main(["verify-invariants", "--quick", "--only", "oig-loo", "orientation", "hc-tau"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3


def test_srm_showdown_command(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["srm-showdown", "--m", "64", "--seeds", "20", "--output", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 20
    assert list(rows[0]) == ["seed", "m", "delta", "srm_err", "collection_err", "m0", "tau_hat"]
    assert all(float(r["srm_err"]) == 0.5 for r in rows)
    assert [int(r["seed"]) for r in rows] == list(range(20))


def test_tau_command(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("0110\n1111\n")
    b.write_text("0110\n")
    assert main(["tau", str(a), str(b), "--points", "0,1,2"]) == 0
    assert "tau(U) = 2" in capsys.readouterr().out
    assert main(["tau", str(a), str(a), "--points", "0,3"]) == 0
    assert "tau(U) = 1" in capsys.readouterr().out
    assert main(["tau", str(a), str(b), "--m", "2"]) == 0
    assert "tau(2) = 2" in capsys.readouterr().out
    part = tmp_path / "p.csv"
    assert main(["tau", str(a), str(b), "--points", "0,1", "--partition-out", str(part)]) == 0
    assert len(part.read_text().splitlines()) == 3
    assert main(["tau", str(a)]) == 2


def test_oig_demo_command(capsys):
    assert main(["oig-demo", "--n", "4", "--sample", "0:0,3:1"]) == 0
    out = capsys.readouterr().out
    assert "5 behaviours" in out and "max out-degree 1" in out
    assert out.count("predict(") == 4


def test_bound_curves():
    grid = list(range(8, 4097, 8))
    cols, rows = emit_bound_curves(grid, vc=0, tau=1, ks=(2, 3))
    assert cols == ["m", "theorem_bound", "forbidden_k2", "forbidden_k3"]
    vals = [r["theorem_bound"] for r in rows]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(r["forbidden_k2"] <= r["forbidden_k3"] for r in rows)
    for r in rows[::37]:
        assert abs(r["theorem_bound"] - theorem_bound(0, 1, r["m"], 0.1)) <= 1e-12
    assert forbidden_bound(1, 2, 100, 0.1) == pytest.approx(math.sqrt((3 * math.log(100) ** 2 + math.log(10)) / 100))


def test_bounds_command(tmp_path, capsys):
    assert main(["bounds", "--m-grid", "8,64", "--k", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "m,theorem_bound,forbidden_k2" and len(lines) == 3
    out = tmp_path / "b.csv"
    assert main(["bounds", "--m-grid", "8,64", "--output", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3
    assert main(["bounds", "--m-grid", "1"]) == 2
