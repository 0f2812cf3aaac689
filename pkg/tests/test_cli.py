import json
import subprocess
import sys

import pytest

from slsdesign.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_odd_both_criteria(capsys):
    code, out, _ = _run(capsys, "verify", "--q", "5", "--t", "0.5", "--measure", "odd")
    assert code == 0
    assert out.startswith("optimal (D) gap=") and "; optimal (A) gap=" in out


def test_verify_non_optimal(capsys):
    code, out, _ = _run(capsys, "verify", "--q", "4", "--t", "0.9", "--measure", "ev1", "--criterion", "D")
    assert code == 0 and out.startswith("not optimal (D)")


@pytest.mark.parametrize("name", ["uniform", "reduced", "example1"])
def test_verify_other_measures(capsys, name):
    code, out, _ = _run(capsys, "verify", "--q", "6", "--t", "0.3", "--measure", name)
    assert code == 0 and "(A)" in out


def test_solve_text_and_json(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = _run(capsys, "solve", "--q", "4", "--t", "0.9", "--criterion", "D", "--json", str(path))
    assert code == 0 and "converged" in out and "0.0778" in out
    d = json.loads(path.read_text())
    assert d["schema_version"] == 1 and d["converged"] and len(d["class_masses"]) == 4


def test_solve_unconverged_exit_1(capsys):
    code, out, _ = _run(capsys, "solve", "--q", "6", "--t", "0.9", "--criterion", "A", "--max-iter", "3")
    assert code == 1 and "NOT converged" in out


def test_solve_full_space(capsys):
    code, out, _ = _run(capsys, "solve", "--q", "3", "--t", "0.5", "--criterion", "A", "--full-space")
    assert code == 0 and "class masses" in out


def test_analytic(capsys, tmp_path):
    path = tmp_path / "a.json"
    code, out, _ = _run(capsys, "analytic", "--kind", "ev2", "--q", "6", "--json", str(path))
    assert code == 0 and "0.0500" in out
    d = json.loads(path.read_text())
    assert d["thresholds"]["t1"] == 0.875


def test_analytic_domain_error_exit_1(capsys):
    code, _, err = _run(capsys, "analytic", "--kind", "ev1", "--q", "5")
    assert code == 1 and err.startswith("error:")


def test_reduce_support_text_and_json(capsys):
    code, out, _ = _run(capsys, "reduce-support", "--q", "7", "--t", "0.5")
    assert code == 0 and out.startswith("d3: BIB(q=7, b=7, r=4, k=4, lambda=2)")
    code, out, _ = _run(capsys, "reduce-support", "--q", "9", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["ledger"]["support_reduced"] == 18 and d["ledger"]["same_H"]


def test_tables_csv_to_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SLSDESIGN_OUTPUT_DIR", str(tmp_path))
    code, _, _ = _run(capsys, "tables", "--id", "T1")
    assert code == 0
    first = (tmp_path / "T1.csv").read_bytes()
    _run(capsys, "tables", "--id", "T1")
    assert (tmp_path / "T1.csv").read_bytes() == first
    assert first.startswith(b"t,xi_t\n")


def test_tables_json_stdout(capsys):
    code, out, _ = _run(capsys, "tables", "--id", "T5", "--format", "json")
    assert code == 0 and json.loads(out)["schema_version"] == 1


@pytest.mark.parametrize("argv", [["solve", "--q", "4", "--t", "1.5", "--criterion", "D"],
                                  ["verify", "--q", "4", "--t", "0.5", "--measure", "bogus"],
                                  ["tables"], []])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "slsdesign", "analytic", "--kind", "odd", "--q", "5"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "odd q=5" in out.stdout
