import json
import subprocess
import sys as _sys

import pytest

from ctrlsel import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_text_report(capsys, fixture_dir):
    code, out, _ = run(capsys, "solve", str(fixture_dir / "demo10.json"),
                       "--problem", "p1")
    assert code == 0
    assert "status: optimal" in out
    assert "optimum: 2" in out
    assert "links: (x2,u1) (x4,u4)" in out
    assert "elapsed:" in out


def test_solve_machine_report_is_byte_stable(capsys, fixture_dir):
    args = ("solve", str(fixture_dir / "demo10.json"), "--problem", "p2",
            "--format", "machine")
    code, first, _ = run(capsys, *args)
    assert code == 0
    code, second, _ = run(capsys, *args)
    assert first == second
    doc = json.loads(first)
    assert doc["engine"] == "lp"
    assert doc["optimum"] == {"num": 13, "den": 1, "decimal": "13"}
    assert doc["sparsity"] == 4
    assert doc["integral"] is True
    assert "elapsed" not in doc


def test_solve_p3_bounds(capsys, fixture_dir):
    demo = str(fixture_dir / "demo10.json")
    code, out, _ = run(capsys, "solve", demo, "--problem", "p3", "--k", "3",
                       "--format", "machine")
    assert code == 0
    assert json.loads(out)["optimum"]["num"] == 52

    code, _, err = run(capsys, "solve", demo, "--problem", "p3", "--k", "1")
    assert code == 2

    with pytest.raises(SystemExit) as exc:
        run(capsys, "solve", demo, "--problem", "p3")
    assert exc.value.code == 4
    with pytest.raises(SystemExit) as exc:
        run(capsys, "solve", demo, "--problem", "p1", "--k", "2")
    assert exc.value.code == 4
    with pytest.raises(SystemExit) as exc:
        run(capsys, "solve", demo, "--problem", "p3", "--k", "-1")
    assert exc.value.code == 4


def test_solve_strict_vs_lenient(capsys, fixture_dir):
    bad = str(fixture_dir / "straddle3.json")
    code, _, err = run(capsys, "solve", bad, "--problem", "p1")
    assert code == 3
    assert "u1" in err

    code, out, _ = run(capsys, "solve", bad, "--problem", "p1", "--lenient",
                       "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert doc["grouped"] is False
    assert doc["grouping_witness"] == [1, 1, 3]
    assert doc["status"] in ("optimal", "fractional")


def test_solve_zero_cost_p4(capsys, tmp_path, fixture_dir):
    text = (fixture_dir / "chain3.json").read_text().replace("[1, 1, 2]",
                                                             "[1, 1, 0]")
    p = tmp_path / "zero.json"
    p.write_text(text)
    code, _, err = run(capsys, "solve", str(p), "--problem", "p4")
    assert code == 3
    assert "assumption violation" in err

    code, _, _ = run(capsys, "solve", str(p), "--problem", "p2")
    assert code == 0


def test_oracle_matches_solve(capsys, fixture_dir):
    demo = str(fixture_dir / "demo10.json")
    _, solve_out, _ = run(capsys, "solve", demo, "--problem", "p2",
                          "--format", "machine")
    code, oracle_out, _ = run(capsys, "oracle", demo, "--problem", "p2",
                              "--format", "machine")
    assert code == 0
    a, b = json.loads(solve_out), json.loads(oracle_out)
    assert a["engine"] == "lp" and b["engine"] == "oracle"
    assert a["optimum"] == b["optimum"]
    assert a["links"] == b["links"]


def test_check_reports_assumptions(capsys, fixture_dir):
    code, out, _ = run(capsys, "check", str(fixture_dir / "chain3.json"))
    assert code == 0
    assert "controllable: yes" in out
    assert "grouped: yes" in out

    code, out, _ = run(capsys, "check", str(fixture_dir / "straddle3.json"),
                       "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert doc["controllable"] is True
    assert doc["grouped"] is False
    assert doc["grouping_witness"] == [1, 1, 3]


def test_check_uncontrollable(capsys, tmp_path):
    p = tmp_path / "stuck.json"
    p.write_text('{"name": "stuck", "n": 2, "m": 1,'
                 ' "a_pattern": [], "b_pattern": [[1, 1, 1]]}')
    code, out, _ = run(capsys, "check", str(p))
    assert code == 0
    assert "controllable: no" in out
    assert "x2" in out


def test_tu_refutes_straddle3(capsys, fixture_dir):
    bad = str(fixture_dir / "straddle3.json")
    code, out, _ = run(capsys, "tu", bad, "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert doc["which"] == "m"
    assert (doc["nrows"], doc["ncols"]) == (9, 9)
    assert doc["is_tu"] is False
    assert doc["determinant"] == -2
    assert doc["witness_rows"] == [0, 2, 3, 6, 8]
    assert doc["witness_cols"] == [0, 3, 5, 6, 7]

    code, out, _ = run(capsys, "tu", bad, "--method", "gh")
    assert code == 0
    assert "NOT TU" in out
    assert "unsignable rows:" in out


def test_tu_certifies_demo10(capsys, fixture_dir):
    demo = str(fixture_dir / "demo10.json")
    code, out, _ = run(capsys, "tu", demo, "--method", "gh", "--which", "mhat")
    assert code == 0
    assert "verdict: TU" in out

    # 28 x 20 exceeds the exhaustive bound
    code, _, err = run(capsys, "tu", demo, "--method", "exhaustive")
    assert code == 1
    assert "too large" in err


def test_tu_mlp(capsys, fixture_dir):
    code, out, _ = run(capsys, "tu", str(fixture_dir / "chain3.json"),
                       "--which", "mlp", "--problem", "p3", "--k", "2",
                       "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert doc["is_tu"] is True
    assert doc["rhs"] is not None
    assert "card" in doc["row_labels"]
    card = doc["row_labels"].index("card")
    assert doc["rhs"][card]["num"] == 1  # k - r = 2 - 1


def test_out_flag_writes_file(capsys, tmp_path, fixture_dir):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "solve", str(fixture_dir / "chain3.json"),
                       "--problem", "p1", "--format", "machine",
                       "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["optimum"]["num"] == 1


def test_parse_error_exit(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    code, _, err = run(capsys, "solve", str(p), "--problem", "p1")
    assert code == 4
    assert "broken.json:1:" in err

    code, _, err = run(capsys, "check", str(tmp_path / "missing.json"))
    assert code == 4


def test_internal_failure_exit(capsys, fixture_dir, monkeypatch):
    from ctrlsel import NonIntegralSolution
    from fractions import Fraction

    def boom(*a, **kw):
        raise NonIntegralSolution(0, Fraction(1, 2))

    monkeypatch.setattr(cli, "solve_problem", boom)
    code, _, err = run(capsys, "solve", str(fixture_dir / "chain3.json"),
                       "--problem", "p1")
    assert code == 5
    assert "internal invariant" in err


def test_console_script_entry_point(fixture_dir):
    proc = subprocess.run(
        [_sys.executable, "-m", "ctrlsel.cli", "oracle",
         str(fixture_dir / "chain3.json"), "--problem", "p1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "optimum: 1" in proc.stdout
