import csv
import io
import json
import subprocess
import sys

import pytest

from lowlying.cli import fmt_table, run

WELL10 = '{"kind": "square_well", "params": {"depth": 10}}'
BARRIER = '{"kind": "square_barrier", "params": {"height": 5}}'
RESONANT = '{"breakpoints": [-1, 1], "values": [-2.4674011002723395]}'
U_MINUS = '{"breakpoints": [-1, 1], "values": [-1]}'


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_eigs_table():
    code, text = call("eigs", "--potential", WELL10)
    assert code == 0
    lines = text.splitlines()
    assert lines[0].split() == ["k", "omega", "lambda", "residual"]
    assert len(lines) == 4
    assert lines[1].split()[2] == "-8.59279"


def test_eigs_machine_formats():
    code, text = call("eigs", "--potential", WELL10, "--format", "json")
    data = json.loads(text)
    assert code == 0 and [d["node_index"] for d in data] == [0, 1, 2]
    assert data[0]["lambda"] == pytest.approx(-8.59278527523, rel=1e-11)
    code, text = call("eigs", "--potential", WELL10, "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["k", "omega", "lambda", "residual"]
    assert float(rows[1][2]) == data[0]["lambda"]


def test_count_and_report():
    assert call("count", "--potential", BARRIER) == (0, "0\n")
    assert call("count", "--potential", WELL10) == (0, "3\n")
    code, text = call("count", "--potential", WELL10, "--report", "--format", "json")
    rep = json.loads(text)
    assert code == 0 and rep["consistent"] and rep["n_regge"] == 3 and rep["reconciled"] == 3
    code, text = call("count", "--potential", WELL10, "--report")
    assert "discrepancy: True" in text and "resonances_in_01: [0.24674, 0.98696]" in text


def test_threshold():
    code, text = call("threshold", "--moment", "sine:1.0")
    assert code == 0
    assert text.splitlines()[1].split()[0] == "-2.0"
    code, text = call("threshold", "--W", '{"breakpoints": [-1, 1], "values": [1]}', "--format", "json")
    assert json.loads(text)["alpha0"] == pytest.approx(-1.833, abs=1e-3)


def test_other_subcommands():
    code, text = call("regge", "--potential", WELL10, "--format", "json")
    assert code == 0 and len(json.loads(text)) == 3
    code, text = call("resonances", "--potential", WELL10, "--format", "json")
    assert json.loads(text) == pytest.approx([0.2467401100272, 0.9869604401089], abs=1e-8)
    code, text = call("theta-eta", "--V", RESONANT, "--U", U_MINUS, "--format", "json")
    assert json.loads(text) == pytest.approx({"theta": -1.0, "eta": 1.0}, abs=1e-9)
    code, text = call("predict", "resonant", "--V", RESONANT, "--U", U_MINUS, "--format", "json")
    assert json.loads(text)["value"] == pytest.approx(-0.25, abs=1e-9)
    code, text = call("predict", "delta", "--W", '{"breakpoints": [-1, 1], "values": [0]}', "--U",
                      '{"breakpoints": [-1, 1], "values": [-3]}', "--format", "json")
    assert (json.loads(text)["lambda0"], json.loads(text)["lambda1"]) == pytest.approx((-9.0, 36.0))
    code, text = call("predict", "low-lying", "--V", WELL10, "--U", U_MINUS)
    assert code == 0 and len(text.splitlines()) == 4


def test_sweep_outputs(tmp_path):
    args = ("sweep", "--V", RESONANT, "--U", U_MINUS, "--eps", "0.08,0.04,0.02")
    code, text = call(*args)
    rep = json.loads(text)
    assert code == 0 and [r["eps"] for r in rep["rows"]] == [0.08, 0.04, 0.02]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert call(*args, "--format", "csv", "--output", str(first)) == (0, "")
    call(*args, "--format", "csv", "--output", str(second))
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().startswith("eps,k,lambda,pred_minus,pred_plus,resid_minus,resid_plus,ext_mass\n")


def test_potential_from_file(tmp_path):
    path = tmp_path / "well.json"
    path.write_text(WELL10)
    assert call("count", "--potential", f"@{path}") == (0, "3\n")


def test_domain_errors_exit_1(capsys):
    code, _ = call("theta-eta", "--V", WELL10, "--U", U_MINUS)
    assert code == 1
    assert "theta_eta" in capsys.readouterr().err
    code, _ = call("eigs", "--potential", '{"breakpoints": [1, 0], "values": [1]}')
    assert code == 1
    assert "make_piecewise" in capsys.readouterr().err
    assert call("sweep", "--V", WELL10, "--eps", "0.01,0.02")[0] == 1


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["eigs"],
    ["eigs", "--potential", "{not json"],
    ["eigs", "--potential", "@/nonexistent/file.json"],
    ["eigs", "--potential", WELL10, "--tol", "-1"],
    ["threshold"],
    ["threshold", "--moment", "sine:1", "--W", WELL10],
    ["predict", "delta", "--U", U_MINUS],
    ["verify", "--criteria", "42"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert call(*argv)[0] == 2
    assert "usage" in capsys.readouterr().err


def test_verify_subset():
    code, text = call("verify", "--criteria", "4")
    assert code == 0
    assert text.splitlines() == [text.splitlines()[0], "1/1 criteria passed"]
    assert text.startswith("[PASS] 4.")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lowlying", "threshold", "--moment", "harmonic:1", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert float(proc.stdout.splitlines()[1].split(",")[0]) == pytest.approx(-(2 ** 0.75), rel=1e-13)


@pytest.mark.parametrize("x, s", [(2.0, "2.0"), (-8.5927853, "-8.59279"), (1e-20, "1e-20"), (3, "3"), (None, "None")])
def test_table_format(x, s):
    assert fmt_table(x) == s
