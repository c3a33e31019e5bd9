import csv
import json

import numpy as np
import pytest

from coolsim.cli import main
from coolsim.core import pair_index


def test_bounds_prints_iol_value(capsys):
    rc = main(["bounds", "--algo", "iol", "--T", "500", "--K", "90", "--smax", "9", "--gmax", "1"])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    assert out == "2863.8"


def test_bounds_batch_and_expected(capsys):
    assert main(["bounds", "--algo", "batch", "--B", "21", "--smax", "1", "--gmax", "1"]) == 0
    assert abs(float(capsys.readouterr().out) - 6.9) < 0.05
    assert main(
        ["bounds", "--algo", "cool-expected", "--T", "500", "--K", "90",
         "--smax", "9", "--gmax", "1", "--c-alpha", "1", "--c-beta", "1", "--beta", "0.9"]
    ) == 0
    assert float(capsys.readouterr().out) > 0


def test_simulate_row_count(tmp_path, capsys):
    out = tmp_path / "a.csv"
    rc = main(
        ["simulate", "--structure", "hemimetric", "--n", "4", "--order", "random",
         "--T", "50", "--algo", "cool", "--alpha", "1", "--beta", "1",
         "--runs", "3", "--seed", "42", "--out", str(out)]
    )
    assert rc == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 50 * 3
    assert rows[0][0] == "run"


def test_simulate_with_config_file(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"structure": "hemimetric", "n": 4, "T": 20, "runs": 1}))
    out = tmp_path / "b.csv"
    rc = main(["simulate", "--config", str(cfgfile), "--T", "25", "--out", str(out)])
    assert rc == 0
    with open(out) as fh:
        assert len(list(csv.reader(fh))) == 1 + 25


def test_sweep_summary_rows(tmp_path):
    out = tmp_path / "s.csv"
    rc = main(
        ["sweep", "--structure", "hemimetric", "--n", "4", "--T", "30", "--runs", "2",
         "--param", "beta", "--values", "1,0.95,0.9,0.85,0.75,0.65,0.5,0.3",
         "--out", str(out)]
    )
    assert rc == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 9
    assert rows[1][0] == "beta"


def test_project_roundtrip(tmp_path, capsys):
    k = 6
    d = np.ones(k)
    d[pair_index(0, 1, 3)] = 8.0
    inp = tmp_path / "d.csv"
    np.savetxt(inp, d.reshape(1, -1), delimiter=",")
    out = tmp_path / "p.csv"
    rc = main(["project", "--input", str(inp), "--r", "9", "--delta", "1e-10", "--out", str(out)])
    assert rc == 0
    got = np.loadtxt(out, delimiter=",")
    assert got[pair_index(0, 1, 3)] == pytest.approx(6.0, abs=1e-6)
    assert got[pair_index(0, 2, 3)] == pytest.approx(3.0, abs=1e-6)


def test_project_with_weights_to_stdout(tmp_path, capsys):
    inp = tmp_path / "d.csv"
    np.savetxt(inp, np.full((1, 6), 1.0), delimiter=",")
    wts = tmp_path / "q.csv"
    np.savetxt(wts, np.full((1, 6), 2.0), delimiter=",")
    rc = main(["project", "--input", str(inp), "--weights", str(wts), "--r", "9", "--delta", "0"])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    assert [float(v) for v in out.split(",")] == [1.0] * 6


def test_airbnb_smoke(tmp_path, capsys):
    curve = tmp_path / "curve.csv"
    rc = main(
        ["airbnb", "--synthetic", "--T", "60", "--runs", "2", "--seed", "3",
         "--curve-out", str(curve)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "cumulative mean reward" in out
    with open(curve) as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 61


def test_unknown_flag_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--bogus", "1"])
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fly"])
    assert exc.value.code != 0


def test_error_paths_are_reported(tmp_path, capsys):
    rc = main(["project", "--input", str(tmp_path / "missing.csv"), "--r", "9", "--delta", "0"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
