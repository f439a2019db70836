from __future__ import annotations

import csv
import io
import json

import pytest

from iterated_shimura import cli


def _run(capsys, argv):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_verify_shapiro_json(capsys):
    code, out = _run(capsys, ["verify", "shapiro", "--depth", "2", "--samples", "5"])
    rep = json.loads(out.out)
    assert code == 0 and rep["pass"] and rep["suite"] == "shapiro"
    assert rep["config"]["depth"] == 2


def test_symbols_output_is_deterministic(capsys):
    a = _run(capsys, ["compute", "symbols", "--weights", "12,16"])[1].out
    b = _run(capsys, ["compute", "symbols", "--weights", "12,16"])[1].out
    assert a == b
    assert [s["cusp_dim"] for s in json.loads(a)["spaces"]] == [2, 2]


def test_config_file_and_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"weights": [14], "tolerances": {"eichler": 1e-3}}))
    monkeypatch.setenv(cli.ENV_CONFIG, str(cfg))
    code, out = _run(capsys, ["verify", "symbols"])
    rep = json.loads(out.out)
    assert code == 0 and rep["config"]["weights"] == [14]
    assert rep["config"]["tolerances"]["eichler"] == 1e-3
    # flags override the file
    code, out = _run(capsys, ["verify", "symbols", "--weights", "22"])
    assert json.loads(out.out)["config"]["weights"] == [22]


def test_tolerance_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"eichler": 1e-40}, "base_points": ["oo"]}))
    code, out = _run(capsys, ["verify", "eichler", "--config", str(cfg), "--depth", "2"])
    assert code == 1 and not json.loads(out.out)["pass"]


def test_bad_config_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"depth": 9}))
    assert _run(capsys, ["verify", "symbols", "--config", str(cfg)])[0] == 2
    cfg.write_text(json.dumps({"nonsense": 1}))
    code, out = _run(capsys, ["verify", "symbols", "--config", str(cfg)])
    assert code == 2 and "nonsense" in out.err


def test_lambda_csv(capsys, tmp_path):
    path = tmp_path / "l.csv"
    code, _ = _run(capsys, ["compute", "lambda", "--grid", "2,6,10", "--out", str(path)])
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert code == 0 and [float(r["s"]) for r in rows] == [2, 6, 10]
    assert all(float(r["fe_residual_plus"]) < 1e-12 for r in rows)


def test_transport_json(capsys):
    code, out = _run(capsys, ["compute", "transport", "--depth", "1", "--from", "i", "--to", "1/2"])
    rep = json.loads(out.out)
    assert code == 0 and rep["error_estimate"] < 1e-10 and rep["to"] == "1/2"


def test_verify_mellin_records_sign(capsys):
    code, out = _run(capsys, ["verify", "mellin", "--s", "9"])
    rep = json.loads(out.out)
    assert code == 0 and rep["calibration"]["functional_equation_sign"]["Delta"] == "+"


def test_unknown_suite_rejected():
    with pytest.raises(SystemExit):
        cli.main(["verify", "nope"])
