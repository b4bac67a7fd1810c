import json
import subprocess
import sys

import pytest

from gamma14.cli import EXIT_EQUALITY_ONLY, EXIT_FALSIFIED, EXIT_NO_WITNESS, EXIT_OK, EXIT_USAGE, run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip().startswith("{") else None), out.err


def test_reduce_q2(capsys, data_dir):
    code, rep, _ = _run(capsys, "reduce", str(data_dir / "q2.json"))
    assert code == EXIT_OK
    assert rep["summary"]["a"] == "1" and rep["summary"]["d"] == "1"
    assert rep["summary"]["branch"] == "AEq1"
    assert "transform" in rep["items"][0]["normal_shape"]


def test_reduce_q1(capsys, data_dir):
    code, rep, _ = _run(capsys, "reduce", str(data_dir / "q1.json"))
    assert code == EXIT_OK
    assert rep["summary"]["a"] == "1/4" and rep["summary"]["d"] == "0.5" and rep["summary"]["m"] == 1


def test_reduce_rejects_asymmetric_gram(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gram": [["1", "2"], ["3", "4"]]}))
    code, _, err = _run(capsys, "reduce", str(bad))
    assert code == EXIT_USAGE and "symmetric" in err


def test_solve_q1_equality_only(capsys, data_dir, tmp_path):
    trace = tmp_path / "trace.json"
    code, rep, _ = _run(capsys, "solve", "--gamma", "8", "--trace", str(trace), str(data_dir / "q1.json"))
    assert code == EXIT_EQUALITY_ONLY
    assert rep["items"][0]["value"] == {"exact": "1/2", "decimal": "0.5"}
    assert json.loads(trace.read_text())["label"]["branch"] == "C2NonIntegral"


def test_solve_random_instance_at_32_3(capsys, tmp_path):
    from gamma14.sampling import random_instances

    inst = next(random_instances(1, seed=4))
    f = tmp_path / "r.json"
    f.write_text(json.dumps(inst.to_json()))
    code, rep, _ = _run(capsys, "solve", "--gamma", "32/3", str(f))
    assert code == EXIT_OK and rep["items"][0]["witness"]["strict"]


def test_bad_gamma_is_usage_error(capsys, data_dir):
    code, _, _ = _run(capsys, "solve", "--gamma", "9", str(data_dir / "q1.json"))
    assert code == EXIT_USAGE


def test_verify_cover_small_table(capsys):
    code, rep, _ = _run(capsys, "verify-cover", "--scenario", "m3K1_a")
    assert code == EXIT_OK
    assert rep["summary"]["rows"] == 6 and rep["summary"]["counterexample"] == 0


def test_verify_cover_empty_table(capsys, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("n,h,k,lambda,remark\n")
    code, _, err = _run(capsys, "verify-cover", "--scenario", "m2K3L4", "--table", str(empty))
    assert code == EXIT_USAGE and "empty" in err


def test_verify_critical_subset(capsys):
    code, rep, _ = _run(capsys, "verify-critical", "--form", "Q1", "--form", "Q2")
    assert code == EXIT_OK and rep["summary"]["certified"] == 2


def test_verify_critical_q4_reports_failure(capsys):
    code, rep, _ = _run(capsys, "verify-critical", "--form", "Q4")
    assert code == EXIT_FALSIFIED and rep["summary"]["failed"] == ["Q4"]


def test_verify_case_tables_deterministic(capsys):
    from gamma14.oracle import bundled_case_table_paths

    path = [p for p in bundled_case_table_paths() if p.endswith("m3K2L1_a5_zero.json")][0]
    a = _run(capsys, "verify-case-tables", "--trials", "50", "--seed", "7", path)
    b = _run(capsys, "verify-case-tables", "--trials", "50", "--seed", "7", path)
    assert a[0] == EXIT_OK and a[1] == b[1]


def test_oracle_command(capsys, data_dir):
    code, rep, _ = _run(capsys, "oracle", "--box", "4", str(data_dir / "q2.json"))
    assert code == EXIT_OK and rep["summary"]["minimum"]["exact"] == "1"


def test_console_script_usage_exit_code():
    res = subprocess.run([sys.executable, "-m", "gamma14.cli", "no-such-command"], capture_output=True, text=True)
    assert res.returncode == EXIT_USAGE


def test_gen_cover_small_scenario(capsys, tmp_path):
    csv = tmp_path / "cover.csv"
    assert run(["gen-cover", "--scenario", "m2K3L4", "--csv", str(csv)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["summary"]["entries"] == len(rep["items"]) == rep["summary"]["certified"]
    assert csv.read_text().startswith("n,h,k,lambda")


def test_gen_cover_stuck_exit_code(capsys):
    assert run(["gen-cover", "--scenario", "m2K3L4", "--k-max", "2"]) == EXIT_NO_WITNESS
