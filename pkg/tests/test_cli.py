import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction as F

import pytest

from prefattach import closed_form
from prefattach.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--m", "1", "--n-max", "3", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "m,n,k,exact,approx"
    assert len(lines) == 7
    assert "1,3,2,1/3,0.333333333333" in lines
    assert "\r" not in out


def test_table_single_row(capsys):
    code, out, _ = run(capsys, "table", "--n-max", "1")
    assert code == 0
    assert out.splitlines()[1:] == ["1,1,1,1/1,1"]


def test_table_usage_error(capsys):
    code, _, err = run(capsys, "table", "--m", "5", "--n-max", "3")
    assert code == 2 and "m" in err


def test_table_json_roundtrips_exactly(capsys):
    code, out, _ = run(capsys, "table", "--m", "2", "--n-max", "30", "--format", "json")
    doc = json.loads(out)
    assert doc["schema_version"] == "1" and doc["command"] == "table"
    by_n = {}
    for rec in doc["results"]:
        assert rec["kind"] == "prob_row"
        by_n.setdefault(rec["n"], []).append(F(rec["exact"]))
    assert all(sum(v) == 1 for v in by_n.values())
    assert sorted(by_n) == list(range(2, 31))


def test_table_output_file(tmp_path, capsys):
    target = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "table", "--n-max", "4", "--output", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert len(rows) == 10
    assert [p.name for p in tmp_path.iterdir()] == ["rows.csv"]


def test_unwritable_output_leaves_nothing(tmp_path, capsys):
    target = tmp_path / "missing" / "rows.csv"
    code, _, err = run(capsys, "table", "--n-max", "4", "--output", str(target))
    assert code == 2 and "cannot write" in err
    assert not target.exists()


@pytest.mark.parametrize(
    "n, k, expected", [("3", "2", "1/3"), ("3", "3", "2/15"), ("5", "1", "128/315")]
)
def test_closed_exact(capsys, n, k, expected):
    code, out, _ = run(capsys, "closed", "--n", n, "--k", k, "--mode", "exact")
    assert code == 0 and out.strip() == expected


def test_closed_float_large(capsys):
    code, out, _ = run(capsys, "closed", "--n", "100000", "--k", "5", "--mode", "float")
    assert code == 0
    value = float(out)
    assert 0 < value < 1


def test_closed_both_json(capsys):
    code, out, _ = run(capsys, "closed", "--n", "3", "--k", "2", "--mode", "both", "--format", "json")
    rec = json.loads(out)["results"][0]
    assert rec["exact"] == "1/3"
    assert float(rec["float"]) == pytest.approx(1 / 3, rel=1e-10)


def test_closed_usage_error(capsys):
    code, _, err = run(capsys, "closed", "--n", "3", "--k", "4")
    assert code == 2 and err


def test_missing_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["closed", "--n", "3"])
    assert info.value.code == 2


def test_simulate_trivial(capsys):
    code, out, _ = run(capsys, "simulate", "--mode", "marginal", "--m", "1", "--n", "1", "--trials", "10")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == "1"
    rec = doc["results"][0]
    assert rec["counts"] == {"1": 10}
    assert rec["trials"] == 10 and rec["master_seed"] == 42


def test_simulate_bytes_identical(capsys):
    argv = ["simulate", "--mode", "graph", "--m", "2", "--n", "9", "--trials", "20000", "--seed", "5"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    _, third, _ = run(capsys, *argv, "--workers", "2")
    assert first == second == third


def test_simulate_bad_flags(capsys):
    code, _, err = run(capsys, "simulate", "--m", "4", "--n", "2")
    assert code == 2 and err
    code, _, _ = run(capsys, "simulate", "--n", "2", "--trials", "0")
    assert code == 2


def test_validate_trivial(capsys):
    code, out, _ = run(capsys, "validate", "--n-max", "1", "--k-max", "3", "--r-max", "3",
                       "--step-k-max", "3", "--step-r-max", "3", "--sim-n", "3")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert {r["kind"] for r in doc["results"]} == {"equivalence", "identity", "stat"}


def test_validate_fails_on_corrupted_closed_form(capsys, monkeypatch):
    real = closed_form.p_closed

    def corrupted(n, k):
        v = real(n, k)
        return closed_form.ClosedFormValue(n, k, exact=v.exact * 2) if n == 4 else v

    monkeypatch.setattr(closed_form, "p_closed", corrupted)
    code, out, err = run(capsys, "validate", "--n-max", "6", "--k-max", "3", "--r-max", "3",
                         "--step-k-max", "3", "--step-r-max", "3", "--trials", "2000")
    assert code == 1
    doc = json.loads(out)
    assert "recurrence_vs_closed_form" in doc["failed_checks"]
    assert err.count("mismatch") == 4


def test_module_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "prefattach", "table", "--n-max", "2", "--output", str(out)],
        capture_output=True, text=True, env={**os.environ},
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[-1] == "1,2,2,1/3,0.333333333333"
