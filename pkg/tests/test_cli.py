import csv
import io
import json

import pytest

from qdeq.cli import main


def run(argv):
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("QDEQ_PRECISION", raising=False)
    monkeypatch.delenv("QDEQ_SEED", raising=False)


def test_unknown_subcommand_is_usage_error(capsys):
    assert run(["frobnicate"])[0] == 2
    assert "usage" in capsys.readouterr().err


def test_bad_flag_value_names_flag(capsys):
    code, _ = run(["dmod", "irr", "--operator", "x4:1"])
    assert code == 2
    assert "--operator" in capsys.readouterr().err


def test_bad_precision_is_usage_error(capsys):
    assert run(["qh", "dump", "--precision", "5"])[0] == 2


def test_dmod_irr_output():
    code, text = run(["dmod", "irr", "--operator", "d4:1; d2:-8/u^2; d1:16/u^2; d0:16/u^4-16/u^2"])
    data = json.loads(text)
    assert code == 0 and data["schema"] == "1" and data["command"] == "dmod irr"
    assert data["result"]["irregularity"] == 4
    assert set(data["result"]["coefficients"]) == {"d4", "d3", "d2", "d1", "d0"}


def test_dmod_report_y_block():
    code, text = run(["dmod", "report", "--space", "twistor", "--block", "y", "--q", "1"])
    rep = json.loads(text)["result"]["samples"][0]["report"]
    assert code == 0 and rep["irr"] == 4 and rep["verdict"] == "unramified exponential type"


def test_json_is_byte_identical():
    argv = ["jfun", "coeff", "--space", "twistor", "--n", "3"]
    assert run(argv) == run(argv)


def test_mzv_commands():
    code, text = run(["mzv", "eval", "--index", "2,1", "--d", "2"])
    assert code == 0 and json.loads(text)["result"]["value"] == "1/4"
    code, text = run(["mzv", "expand", "--sym", "2,1"])
    assert code == 0 and "3" in text


def test_gamma_verify_exit_codes():
    assert run(["gamma", "verify", "--space", "cpn:3", "--n", "100000"])[0] == 0
    assert run(["gamma", "verify", "--space", "twistor", "--n", "1000"])[0] == 1


def test_peaks_scan_csv():
    code, text = run(["peaks", "scan", "--betas", "1,1", "--b", "1,1", "--x", "1e3,1e4",
                      "--nu", "0.4", "--k", "1", "--bseq", "harmonic", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and [r["x"] for r in rows] == ["1000", "10000"]
    assert {"head", "tail", "defect", "stokes"} <= set(rows[0])


def test_env_precision_recorded(monkeypatch):
    monkeypatch.setenv("QDEQ_PRECISION", "30")
    data = json.loads(run(["qh", "dump", "--space", "cp2"])[1])
    assert data["config"]["digits"] == 30


def test_verify_all_subset(capsys):
    code, text = run(["verify-all", "--only", "3"])
    data = json.loads(text)
    assert code == 0
    assert "criterion 3 [PASS]" in capsys.readouterr().err
    crit = data["result"]["criteria"][0]
    assert crit["pass"] is True and all(c["anchor"] for c in crit["checks"])
