import json

import numpy as np
import pytest

from qubitent.cli import run
from qubitent.regions import max_radial_deviation, read_boundary_csv

UNIFORM = ",".join(["0.125"] * 8)


def test_entropy_prints_three(capsys):
    assert run(["entropy", "--q", UNIFORM, "--order", "2"]) == 0
    assert capsys.readouterr().out == "3.0\n"


def test_entropy_undefined_and_json(capsys):
    q = "-1.2,0.4,0.4,0.4,0.4,0.4,0.1,0.1"
    assert run(["entropy", "--q", q, "--order", "3"]) == 0
    assert capsys.readouterr().out == "undefined\n"
    assert run(["entropy", "--q", UNIFORM, "--order", "4", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["entropy"] == 3.0 and d["defined"]


def test_member_pole(capsys):
    assert run(["member", "--r", "1,0,0", "--k", "3"]) == 0
    assert capsys.readouterr().out == "inside margin=0.000000\n"


def test_member_outside(capsys):
    assert run(["member", "--r", "0.9,0.9,0", "--k", "1"]) == 0
    assert capsys.readouterr().out == "outside margin=-0.389567\n"


def test_ball(capsys):
    assert run(["ball", "--r", "1,1,0"]) == 0
    assert capsys.readouterr().out == "false\n"


def test_maxent_json(capsys):
    assert run(["maxent", "--r", "1,0,0", "--k", "2", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert set(d) >= {"r", "k", "entropy", "q", "iterations", "converged"}
    assert d["entropy"] == 2.0 and d["q"] == [0.25] * 4 + [0.0] * 4


def test_maxent_csv(capsys):
    assert run(["maxent", "--r", "0,0,0", "--k", "2"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.startswith("r_x,r_y,r_z,k,entropy")
    assert row.split(",")[4] == "3.0"


def test_nine_significant_digits(capsys):
    assert run(["maxent", "--r", "0.3,0.2,0.1", "--k", "2", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["entropy"] == float(f"{d['entropy']:.9g}")


@pytest.mark.parametrize("argv, flag", [
    (["member", "--r", "2,0,0", "--k", "1"], "--r"),
    (["member", "--r", "1,0", "--k", "1"], "--r"),
    (["entropy", "--q", "1,2", "--order", "2"], "--q"),
    (["scan", "--k", "1", "--res", "8"], "--res"),
    (["scan", "--k", "1", "--plane", "w=3"], "--plane"),
    (["member", "--r", "0,0,0"], "--k"),
    (["member", "--r", "0,0,0", "--k", "x"], "--k"),
])
def test_input_errors_exit_one(argv, flag, capsys):
    assert run(argv) == 1
    assert flag in capsys.readouterr().err


def test_order_out_of_range_is_input_error(capsys):
    assert run(["member", "--r", "0,0,0", "--k", "40"]) == 1


def test_nonconvergence_exit_two(monkeypatch, capsys):
    import qubitent.maxent as mx
    monkeypatch.setattr(mx, "MAX_ITER", 0)
    assert run(["maxent", "--r", "0.3,0.5,-0.2", "--k", "3"]) == 2
    assert "converge" in capsys.readouterr().err


def test_scan_writes_unit_circle(tmp_path):
    out = tmp_path / "boundary_k1.csv"
    grid = tmp_path / "grid.csv"
    assert run(["scan", "--k", "1", "--plane", "z=0", "--res", "101", "--out", str(out),
                "--grid", str(grid)]) == 0
    pts = read_boundary_csv(out.read_text())
    assert max_radial_deviation(pts) <= 2 / 101
    assert grid.read_text().startswith("r_a,r_b,margin_bits,inside\n")


def test_scan_json(tmp_path):
    out = tmp_path / "scan.json"
    assert run(["scan", "--k", "2", "--res", "16", "--format", "json", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["k"] == 2 and d["plane"] == "z=0" and len(d["cells"]) == 256


def test_scan_deterministic_across_jobs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["scan", "--k", "2", "--res", "70", "--out", str(a), "--jobs", "1"]) == 0
    assert run(["scan", "--k", "2", "--res", "70", "--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_ball_and_nest(tmp_path, capsys):
    out = tmp_path / "ball.json"
    assert run(["verify-ball", "--samples", "500", "--seed", "4", "--format", "json",
                "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["mismatches"] == [] and d["samples"] == 500
    assert run(["nest", "--k-max", "3", "--rays", "6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "ray,u_x,u_y,u_z,radius_k1,radius_k2,radius_k3"
    assert len(lines) == 7


def test_nest_deterministic(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        p = tmp_path / f"n{jobs}.csv"
        assert run(["nest", "--k-max", "3", "--rays", "8", "--seed", "9", "--jobs", jobs,
                    "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_probe_beta_json(capsys):
    assert run(["probe-beta", "--k", "2", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["k"] == 2 and len(d["entries"]) == 4
    assert d["entries"][-1]["gap"] <= 1e-3


def test_unbiasedness(capsys):
    assert run(["unbiasedness", "--k-max", "2"]) == 0
    assert capsys.readouterr().out.startswith("k,pole_entropy,extent_y,extent_z\n")


def test_reality_check(capsys):
    assert run(["reality-check", "--alpha", "2", "--trials", "1000"]) == 0
    assert capsys.readouterr().out.startswith("always_real trials=1000")
    assert run(["reality-check", "--alpha", "3", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert not d["always_real"]
    q = np.array(d["counterexample"])
    assert (q ** 3).sum() < 0


def test_figure3_json(tmp_path):
    assert run(["figure3", "--res", "24", "--k-max", "2", "--format", "json",
                "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "boundary_k2.json").read_text())
    assert d["k"] == 2 and "cells" not in d


def test_negative_list_values(capsys):
    assert run(["member", "--r", "-1,0,0", "--k", "2"]) == 0
    assert capsys.readouterr().out == "inside margin=0.000000\n"
    assert run(["ball", "--r", "-.5,-0.5,0"]) == 0
    assert capsys.readouterr().out == "true\n"
