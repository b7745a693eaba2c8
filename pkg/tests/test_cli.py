import json

import numpy as np
import pytest
from click.testing import CliRunner

from lempertkit.cli import main

BALL2 = {"kind": "ball", "n": 2, "params": {}}
PROB_BOUNDARY = {
    "variant": "boundary",
    "p": [[1.0, 0.0], [0.0, 0.0]],
    "v": [[0.8, 0.0], [0.3, 0.3]],
}


@pytest.fixture()
def runner():
    return CliRunner()


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


# -- exit codes --------------------------------------------------------------


def test_solve_success_exit_zero(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    prob = write(tmp_path, "prob.json", PROB_BOUNDARY)
    out = str(tmp_path / "pair.json")
    res = runner.invoke(main, ["geodesic", "solve", "--domain", dom, "--problem", prob, "--out", out])
    assert res.exit_code == 0, res.output
    data = json.loads((tmp_path / "pair.json").read_text())
    assert data["certificate"]["pass"]


def test_malformed_json_exit_one(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    prob = write(tmp_path, "prob.json", PROB_BOUNDARY)
    res = runner.invoke(main, ["geodesic", "solve", "--domain", str(bad), "--problem", prob])
    assert res.exit_code == 1


def test_missing_file_exit_one(runner, tmp_path):
    prob = write(tmp_path, "prob.json", PROB_BOUNDARY)
    res = runner.invoke(main, ["geodesic", "solve", "--domain", str(tmp_path / "nope.json"), "--problem", prob])
    assert res.exit_code == 1


def test_near_tangential_exit_two(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    prob = write(
        tmp_path,
        "prob.json",
        {
            "variant": "boundary",
            "p": [[1.0, 0.0], [0.0, 0.0]],
            "v": [[1e-5, 0.0], [1.0, 0.0]],
        },
    )
    res = runner.invoke(main, ["geodesic", "solve", "--domain", dom, "--problem", prob])
    assert res.exit_code == 2
    assert "near-tangential" in res.output


def test_verify_exit_zero(runner, tmp_path):
    res = runner.invoke(main, ["verify", "rigidity", "--seed", "0"])
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["pass"] is True


# -- simple value commands ---------------------------------------------------


def test_distance_radial(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    res = runner.invoke(main, ["distance", "--domain", dom, "--z", "0,0", "--w", "0.5,0"])
    assert res.exit_code == 0, res.output
    val = json.loads(res.output)["distance"]
    assert abs(val - np.arctanh(0.5)) < 1e-8


def test_metric_center(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    res = runner.invoke(main, ["metric", "--domain", dom, "--z", "0,0", "--v", "1,0"])
    assert res.exit_code == 0, res.output
    val = json.loads(res.output)["metric"]
    assert abs(val - 1.0) < 1e-8


def test_rep_map_ball_identity(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    res = runner.invoke(main, ["rep", "map", "--domain", dom, "--p", "1,0", "--z", "0.2,0.1"])
    assert res.exit_code == 0, res.output
    w = json.loads(res.output)["w"]
    assert abs(w[0][0] - 0.2) < 1e-10 and abs(w[1][0] - 0.1) < 1e-10


def test_horosphere_alias(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    res = runner.invoke(
        main,
        ["horosphere", "--domain", dom, "--p", "1,0", "--z0", "0,0", "--R", "1.5", "--z", "0,0"],
    )
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["member"] is True


def test_busemann_alias(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    res = runner.invoke(
        main, ["busemann", "--domain", dom, "--p", "1,0", "--z", "0.3,0", "--z0", "0,0"]
    )
    assert res.exit_code == 0, res.output
    val = json.loads(res.output)["busemann"]
    assert abs(val + np.arctanh(0.3)) < 1e-10


# -- field CSV ---------------------------------------------------------------


def test_field_header_and_values(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    out = str(tmp_path / "field.csv")
    res = runner.invoke(
        main, ["field", "--domain", dom, "--p", "1,0", "--grid", "32x1", "--out", out]
    )
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "field.csv").read_text().strip().split("\n")
    assert lines[0] == "re_z1,im_z1,value"
    assert len(lines) == 33
    nan_seen = False
    for line in lines[1:]:
        x_s, y_s, v_s = line.split(",")
        x = float(x_s)
        assert float(y_s) == 0.0
        if v_s == "nan":
            nan_seen = True
            assert abs(x - 1.0) < 2e-2 or x**2 >= 1.0
        else:
            # kernel along the diameter toward p = e1 is -(1+x)/(1-x)
            assert abs(float(v_s) + (1 + x) / (1 - x)) < 1e-10
    assert nan_seen  # the point nearest the pole must be masked


def test_field_rejects_bad_grid(runner, tmp_path):
    dom = write(tmp_path, "dom.json", BALL2)
    res = runner.invoke(main, ["field", "--domain", dom, "--p", "1,0", "--grid", "bogus"])
    assert res.exit_code == 1


# -- rigidity ----------------------------------------------------------------


def test_rigidity_verify_shoikhet(runner, tmp_path):
    f = write(tmp_path, "f.json", {"type": "shoikhet"})
    res = runner.invoke(main, ["rigidity", "verify", "--f", f, "--grid", "32x64"])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["verdict"] == "PASS"
    assert rep["margins"]["i"] >= -1e-10
    assert rep["margins"]["ii"] >= -1e-8
    assert abs(rep["f3_estimate"] + 0.6) < 1e-6


# -- determinism -------------------------------------------------------------


def test_verify_deterministic_output(runner, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = str(tmp_path / name)
        res = runner.invoke(main, ["verify", "rigidity", "--seed", "42", "--out", out])
        assert res.exit_code == 0, res.output
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_verify_seed_changes_output(runner, tmp_path):
    outs = []
    for seed, name in (("1", "a.json"), ("2", "b.json")):
        out = str(tmp_path / name)
        res = runner.invoke(main, ["verify", "rigidity", "--seed", seed, "--out", out])
        assert res.exit_code == 0, res.output
        outs.append(json.loads((tmp_path / name).read_text()))
    assert outs[0]["seed"] != outs[1]["seed"]
