from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from gkpgate import cli
from gkpgate.pipeline import gate_spec


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def csv_rows(text: str):
    header, body = text.split("\n", 1)
    assert header.startswith("# version: v1;")
    return header, list(csv.DictReader(io.StringIO(body)))


def test_table2_csv_columns_and_exit(capsys):
    code, out = run(capsys, "table2", "--d", "2", "--kappa", "0.05")
    header, rows = csv_rows(out)
    assert code == 0 and "all_pass: True" in header
    assert list(rows[0].keys()) == cli.COLUMNS
    assert [r["gate"] for r in rows] == ["X", "Z", "F"]
    x = rows[0]
    assert float(x["upper"]) <= 8 * 0.05 and x["pass"] == "True" and x["regime_ok"] == "True"


def test_table2_out_of_regime_flagged_not_fatal(capsys):
    code, out = run(capsys, "table2", "--d", "2", "--kappa", "0.3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["version"] == "v1"
    assert all(not r["regime_ok"] for r in doc["rows"])


def test_table2_json_to_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    code, out = run(capsys, "table2", "--d", "2,3", "--kappa", "0.1,0.05", "--format", "json", "--out", str(path), "--jobs", "2")
    doc = json.loads(path.read_text())
    assert code == 0 and out == ""
    assert len(doc["rows"]) == 12
    assert [(r["d"], r["kappa"]) for r in doc["rows"][::3]] == [(2, 0.1), (2, 0.05), (3, 0.1), (3, 0.05)]


def test_jobs_do_not_change_output(capsys):
    _, a = run(capsys, "table2", "--d", "2,3", "--kappa", "0.1", "--format", "json")
    _, b = run(capsys, "table2", "--d", "2,3", "--kappa", "0.1", "--format", "json", "--jobs", "3")
    assert a == b


def test_nogo_passes_in_regime_and_flags_outside(capsys):
    code, out = run(capsys, "nogo", "--d", "2,3", "--kappa", "0.003,0.1", "--format", "json")
    doc = json.loads(out)
    rows = {(r["d"], r["kappa"]): r for r in doc["rows"]}
    assert rows[(2, 0.003)]["regime_ok"] and rows[(2, 0.003)]["lower"] >= 0.03
    assert not rows[(2, 0.1)]["regime_ok"]
    assert code == 0


def test_nogo_asymmetric_rows(capsys):
    code, out = run(capsys, "nogo", "--d", "2", "--kappa", "0.01", "--asym-delta", "0.005", "--format", "json")
    doc = json.loads(out)
    asym = [r for r in doc["rows"] if r["gate"] == "P-asym"]
    assert asym and asym[0]["pass"] and asym[0]["lower"] >= 1 / 50
    assert code == 0


def test_sweep_explicit_delta_eps(capsys):
    code, out = run(capsys, "sweep", "--gate", "X,Z^2,P", "--d", "3", "--kappa", "0.1", "--delta", "0.004", "--eps", "0.15")
    _, rows = csv_rows(out)
    assert [r["gate"] for r in rows] == ["X", "Z^2", "P"]
    assert all(float(r["delta"]) == 0.004 and float(r["eps"]) == 0.15 for r in rows)
    # Asymmetric parameters are outside the proven regime, so nothing is checked.
    assert code == 0 and all(r["regime_ok"] == "False" for r in rows)


def test_delta_and_symmetric_exclusive():
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--delta", "0.01", "--symmetric"])


def test_empty_kappa_list_rejected():
    with pytest.raises(SystemExit):
        cli.main(["table2", "--kappa", ","])


def test_xcheck_identity_and_paulis(capsys):
    code, out = run(capsys, "xcheck", "--gate", "I,X,Z", "--d", "2", "--kappa", "0.3", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    ident = doc["rows"][0]
    assert ident["gate"] == "I" and ident["method"].endswith("vs-grid")
    assert ident["err_est"] < 1e-12
    assert all(r["pass"] for r in doc["rows"])


def test_xcheck_unknown_gate_is_usage_error(capsys):
    assert cli.main(["xcheck", "--gate", "Q", "--d", "2", "--kappa", "0.3"]) == 2


def test_xcheck_infeasible_grid_is_skipped(capsys):
    code, out = run(capsys, "xcheck", "--gate", "F", "--d", "3", "--kappa", "0.001", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert row["method"].startswith("skipped") and not row["pass"] and not row["regime_ok"]
    assert code == 0


def test_domain_error_exit_code(capsys):
    code = cli.main(["sweep", "--gate", "X", "--d", "2", "--kappa", "0.1", "--eps", "0.4"])
    assert code == 2
    assert "gkpgate:" in capsys.readouterr().err


def circuit_doc(bound2=0.2, order=("1", "2")):
    return {
        "vertices": [
            {"id": "in", "role": "input"},
            {"id": "1", "role": "interior"},
            {"id": "2", "role": "interior"},
            {"id": "out", "role": "output"},
        ],
        "edges": [
            {"id": "a", "src": "in", "dst": "1", "dim": 2},
            {"id": "b", "src": "1", "dst": "2", "dim": 2},
            {"id": "c", "src": "2", "dst": "out", "dim": 2},
        ],
        "order": list(order),
        "gates": {"1": {"bound": 0.1}, "2": {"bound": bound2}},
    }


def test_circuit_chain_budget(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(circuit_doc()))
    code, out = run(capsys, "circuit", str(path))
    doc = json.loads(out)
    assert code == 0 and doc["valid"] and doc["budget"] == pytest.approx(0.3)
    assert doc["order"] == ["1", "2"] and doc["version"] == "v1"


def test_circuit_with_computed_gates(tmp_path, capsys):
    data = circuit_doc()
    params = {"kappa": 0.05, "delta": 0.05 / (4 * 3.141592653589793), "eps": 0.25, "d": 2}
    data["gates"] = {"1": {"gate": "X", "params": params}, "2": {"gate": "Z", "params": params}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(data))
    code, out = run(capsys, "circuit", str(path))
    doc = json.loads(out)
    assert code == 0 and doc["budget"] == pytest.approx(sum(doc["per_gate"].values()))
    assert doc["budget"] <= 2 * 8 * 0.05


@pytest.mark.parametrize("content", ["{not json", json.dumps(circuit_doc(order=("2", "1")))])
def test_circuit_invalid_exits_nonzero_with_report(tmp_path, capsys, content):
    path = tmp_path / "c.json"
    path.write_text(content)
    code = cli.main(["circuit", str(path)])
    out = capsys.readouterr().out
    assert code != 0
    if out:
        doc = json.loads(out)
        assert not doc["valid"] and doc["problems"]


def test_circuit_missing_file_exit_code(tmp_path, capsys):
    assert cli.main(["circuit", str(tmp_path / "missing.json")]) == 2


def test_gate_spec_labels():
    assert gate_spec("I").m == 0 and gate_spec("Z^3").m == 3 and gate_spec(" F ").kind == "F"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gkpgate", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == cli.__version__


def test_shipped_circuit_example(capsys):
    from pathlib import Path

    path = Path(__file__).resolve().parent.parent / "circuits" / "two_layer.json"
    code, out = run(capsys, "circuit", str(path))
    doc = json.loads(out)
    assert code == 0 and doc["order"] == ["1", "2", "3"]
    assert doc["budget"] == pytest.approx(sum(doc["per_gate"].values()))
