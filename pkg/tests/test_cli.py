import json
import subprocess
import sys

from qpde.cli import run


def test_expand_rank(capsys):
    assert run(["expand", "rank", "--order", "5"]) == 0
    out = capsys.readouterr().out
    assert "q^4: z^3 + z + 1 + z^(-1) + z^(-3)" in out


def test_expand_json_roundtrip(capsys):
    from qpde.series import QSeries, qs_equal
    from qpde import special as sp
    assert run(["expand", "mu", "--alpha", "1/2", "--order", "3", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    back = QSeries.from_json(doc)
    assert qs_equal(back, sp.mu_series(1, 1, 0.5, 0, 3), 3).equal


def test_verify_json(capsys):
    assert run(["verify", "diff1", "--order", "20", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["name"] == "diff1" and doc["status"] == "pass"


def test_verify_failure_exit_code(capsys):
    assert run(["verify", "diff1-perturbed", "--order", "8"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_usage_errors(capsys):
    assert run(["verify", "nosuchidentity"]) == 2
    assert "unknown identity" in capsys.readouterr().err
    assert run(["verify", "diff1", "--order", "0"]) == 2
    assert run(["verify", "diff1", "--order", "x/y"]) == 2
    assert run(["scan", "--p", "4", "--a-max", "5", "--n-max", "5"]) == 2
    assert run(["scan", "--p", "5", "--k", "3", "--a-max", "5", "--n-max", "5"]) == 2
    assert run(["expand", "nothing"]) == 2
    assert run(["expand", "mu", "--alpha", "1"]) == 2
    assert run([]) == 2


def test_moments_and_scan(capsys, tmp_path):
    assert run(["moments", "--k", "2", "--n-max", "4"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "4,10"
    out = tmp_path / "c.jsonl"
    assert run(["scan", "--p", "5", "--k", "2", "--a-max", "25", "--n-max", "20",
                "--format", "json", "--out", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert {"A": 25, "B": 17} == {k: rows[0][k] for k in ("A", "B")}


def test_numeric_check_and_list(capsys):
    assert run(["numeric-check", "theta-lemma", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows and all(r["passed"] for r in rows)
    assert run(["list"]) == 0
    assert "diff1-perturbed" not in capsys.readouterr().out


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "qpde", "verify", "nosuchidentity"],
                       capture_output=True, text=True)
    assert p.returncode == 2 and "unknown identity" in p.stderr
