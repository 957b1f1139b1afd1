import csv
import io
import json

import pytest

from robust_stopping.cli import InputError, RunSpec, main, parse_json, parse_n_list

FRECHET = '{"family": "frechet", "shape": 2.197, "scale": 0.613}'


def test_monopoly_json(capsys):
    assert main(["monopoly", "--dist", FRECHET]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["p_star"] == pytest.approx(0.524, abs=1e-3)
    assert out["pi_star"] == pytest.approx(0.396, abs=1e-3)
    assert out["c"] == pytest.approx(0.208, abs=1e-3)


def test_monopoly_point_masses(capsys):
    assert main(["monopoly", "--dist", '{"family": "pointmasses", "atoms": [[1, 0.5], [2, 0.5]]}']) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out["p_star"], out["pi_star"], out["c"]) == (1.0, 1.0, None)


def test_parse_error_reports_position(capsys):
    assert main(["monopoly", "--dist", '{"family": \n "frechet",, }']) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_dist_from_file(tmp_path, capsys):
    p = tmp_path / "d.json"
    p.write_text('{"family": "exponential", "rate": 1}')
    assert main(["monopoly", "--dist", str(p)]) == 0
    assert json.loads(capsys.readouterr().out)["pi_star"] == pytest.approx(0.36788, abs=1e-5)


def test_bounds_csv_and_bit_stability(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["bounds", "--dist", FRECHET, "--n", "2,10", "--scaling", "sqrt_n"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2), "--jobs", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = list(csv.DictReader(io.StringIO(out1.read_text())))
    assert [r["n"] for r in rows] == ["2", "10"]
    assert float(rows[0]["lower_uniform"]) == pytest.approx(0.695, abs=5e-3)
    assert float(rows[0]["upper_universal"]) == pytest.approx(1.268, abs=5e-3)
    assert rows[0]["status"] == "ok"
    assert len(rows[0]["lower_det"].replace(".", "").lstrip("0")) <= 9


def test_bounds_partial_failure_exit_code(capsys):
    code = main(["bounds", "--dist", '{"family": "exponential"}', "--n", "2,40"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert code == 2
    assert rows[0]["status"].startswith("lower_uniform") and rows[1]["status"] == "ok"


def test_figure2_json(capsys):
    assert main(["figure2", "--n", "45", "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)[0]
    assert row["upper_partition"] == pytest.approx(2.672, abs=0.01)
    assert row["upper_envelope"] is not None


def test_prophet(capsys):
    assert main(["prophet", "--mu", "1", "--sigma2", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["z"] == 1.0


def test_simulate(capsys):
    args = ["simulate", "--dist", '{"family": "exponential"}', "--policy", '{"kind": "uniform", "lo": 0.8, "hi": 1.2}']
    assert main(args + ["--n", "3", "--samples", "100000", "--seed", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["z_score"]) < 4


def test_n_list_parsing():
    assert parse_n_list("2,3, 5-7") == (2, 3, 5, 6, 7)
    with pytest.raises(InputError):
        parse_n_list("2,x")
    with pytest.raises(InputError):
        RunSpec("bounds", None, (3, 2), None, 0)
    with pytest.raises(InputError):
        parse_json("not-a-file", "--dist")
