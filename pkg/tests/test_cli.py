from __future__ import annotations

import json

import pytest

from flockgame.cli import main
from flockgame.results import SpeResult


def write(tmp_path, name, **overrides):
    data = {"beta1": 4.5, "beta2": 4, "E1": 5, "E2": 3, "r": 2, "t_o": 10, **overrides}
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_dt(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--mode", "dt", "--params", write(tmp_path, "p.json"))
    assert code == 0
    d = json.loads(out)
    assert d["case"] == "DT-3.1.a"
    assert [(o["t1"], o["t2"]) for o in d["outcomes"]] == [(8.0, 9.0)]


def test_solve_ct_empty(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--mode", "ct", "--params", write(tmp_path, "p.json"))
    d = json.loads(out)
    assert code == 0 and d["outcomes"] == [] and d["case"] == "CT-2.2.b"


def test_solve_sfg_csv(tmp_path, capsys):
    code, out, _ = run(
        capsys, "solve", "--mode", "sfg", "--output", "csv", "--params", write(tmp_path, "p.json", E1=3.2)
    )
    assert code == 0
    assert out.splitlines()[1].startswith("SFG-coop,SFG_COOP,10,10,StrictFlock")


@pytest.mark.parametrize("mode", ["ct", "dt", "sfg"])
def test_round_trip(tmp_path, capsys, mode):
    code, out, _ = run(capsys, "solve", "--mode", mode, "--params", write(tmp_path, "p.json", E1=4))
    res = SpeResult.from_dict(json.loads(out))
    assert json.loads(json.dumps(res.to_dict(10.0))) is not None
    for o in res.outcomes:
        assert o.t1.t <= 10 and o.t2.t <= 10


def test_invalid_params_exit_1(tmp_path, capsys):
    code, _, err = run(capsys, "solve", "--mode", "dt", "--params", write(tmp_path, "p.json", beta1=3))
    assert code == 1 and "beta1 > beta2" in err


def test_window_exit_1(tmp_path, capsys):
    code, _, err = run(capsys, "solve", "--mode", "ct", "--params", write(tmp_path, "p.json", w=2))
    assert code == 1 and "w = 1" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--mode", "dt", "--params", "/nonexistent.json"],
        ["solve", "--mode", "xx"],
        ["bogus"],
        ["verify", "--mode", "dt", "--trials", "0"],
        ["verify", "--mode", "ct", "--trials", "1", "--step", "0.1"],
    ],
)
def test_input_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_bad_range_exit_1(tmp_path, capsys):
    p = write(tmp_path, "p.json")
    assert run(capsys, "sweep", "--params", p, "--range", "6:1")[0] == 1
    assert run(capsys, "sweep", "--params", p, "--range", "abc")[0] == 1


def test_verify_dt(capsys):
    code, out, _ = run(capsys, "verify", "--mode", "dt", "--trials", "50", "--seed", "0")
    assert code == 0
    assert out.splitlines()[0] == "dt: 50/50 exact matches"
    assert "coverage:" in out


def test_verify_known_tie_instance(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--mode", "dt", "--params", write(tmp_path, "p.json"))
    assert code == 0
    assert "follower tie at t1 = 8" in out


def test_verify_mismatch_exit_2(monkeypatch, capsys):
    import flockgame.verify as verify_mod

    real = verify_mod.solve_dt

    def broken(params, *a, **kw):
        res = real(params, *a, **kw)
        res.outcomes = res.outcomes[:0]
        return res

    monkeypatch.setattr(verify_mod, "solve_dt", broken)
    code, out, _ = run(capsys, "verify", "--mode", "dt", "--trials", "3")
    assert code == 2
    assert "first failure: trial 0" in out


def test_verify_parallel_matches_serial(capsys):
    serial = run(capsys, "verify", "--mode", "dt", "--trials", "40", "--output", "json")[1]
    parallel = run(capsys, "verify", "--mode", "dt", "--trials", "40", "--output", "json", "--workers", "2")[1]
    assert serial == parallel


def test_sweep_rows_and_determinism(tmp_path, capsys):
    p = write(tmp_path, "base.json")
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out_a, out_b):
        assert run(capsys, "sweep", "--params", p, "--range", "0.05:6", "--step", "0.05", "--out", str(out))[0] == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert len(out_a.read_text().splitlines()) == 121


def test_boundaries(tmp_path, capsys):
    code, out, _ = run(
        capsys, "boundaries", "--params", write(tmp_path, "base.json"), "--range", "1:1000", "--tol", "1e-9"
    )
    d = json.loads(out)
    assert code == 0 and set(d) >= {"gate", "a", "b", "tol"}
    assert d["b"][0] == pytest.approx(41 / 9, abs=1e-8)


def test_compare(tmp_path, capsys):
    code, out, _ = run(
        capsys, "compare", "--params", write(tmp_path, "base.json"), "--samples", "400", "--output", "csv"
    )
    assert code == 0
    assert out.splitlines() == [
        "game,existence,uniqueness,n_types,strict_flock,t1_le_t2",
        "SFG,yes,yes,2,possible,yes",
        "continuous-time,no,no,3,never,yes",
        "discrete-time,yes,no,5,possible,no",
    ]
