import csv
import io
import json
from pathlib import Path

import pytest

from degtail.cli import main
from degtail.exact import parse_rational

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


# ------------------------------------------------------------------ eval


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--what", "exp", "--lambda", "1/2", "--x", "1", "--y", "1"], "9/4"),
        (["--what", "tail", "--lambda", "1/2", "--y", "1", "--n", "1"], "1/4"),
        (["--what", "cosh", "--lambda", "0", "--y", "0"], "1"),
        (["--what", "cosh", "--lambda", "1/2", "--y", "1"], "5/4"),
        (["--what", "exp-partial", "--lambda", "1/2", "--y", "1", "--n", "1"], "2"),
        (["--what", "bell", "--lambda", "1/2", "--x", "1", "--n", "2"], "3/2"),
        (["--what", "fallfact", "--lambda", "1/2", "--x", "1", "--n", "2"], "1/2"),
    ],
)
def test_eval_exact_examples(argv, expected):
    code, out, err = run("eval", *argv)
    assert code == 0 and err == ""
    assert out.strip() == expected


def test_eval_numeric_reports_tail_bound():
    code, out, _ = run("eval", "--what", "tail", "--lambda", "-2/5", "--y", "1/2", "--n", "2")
    assert code == 0
    value, *extras = out.split()
    float(value)
    assert any(e.startswith("tail_bound=") for e in extras)
    assert any(e.startswith("terms_used=") for e in extras)


def test_eval_json():
    code, out, _ = run("eval", "--what", "exp", "--lambda=-2/5", "--y", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["exact"] is False and d["lambda"] == "-2/5"
    assert float(d["value"]) == pytest.approx(0.6 ** -2.5, rel=1e-15)


def test_eval_negative_rational_without_equals():
    code, out, _ = run("eval", "--what", "exp", "--lambda", "-1/2", "--y", "1")
    assert code == 0 and out.strip() == "4"  # (1 - 1/2)**-2


@pytest.mark.parametrize("bad", ["0.5", "1/0", "x", "1//2"])
def test_eval_malformed_rational(bad):
    code, out, err = run("eval", "--what", "exp", "--lambda", bad)
    assert code == 2 and out == ""
    assert "lambda" in err


def test_eval_domain_errors():
    code, _, err = run("eval", "--what", "tail", "--lambda", "2", "--y", "1")
    assert code == 2 and "NonConvergence" not in err and "converge" in err.lower()
    code, _, _ = run("eval", "--what", "exp", "--lambda", "2/3", "--y", "-2")
    assert code == 2


def test_unknown_subcommand_and_flag(capsys):
    assert run("frobnicate")[0] == 2
    assert run("eval", "--what", "nope")[0] == 2
    assert run("table", "--kind", "stirling2")[0] == 2


# ----------------------------------------------------------------- table


def test_table_classical():
    code, out, _ = run("table", "--kind", "stirling2", "--nmax", "3")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "n,k,value"
    assert "3,2,3" in rows
    assert len(rows) == 1 + 10


def test_table_degenerate():
    code, out, _ = run("table", "--kind", "stirling2-deg", "--lambda", "1/2", "--nmax", "2")
    assert code == 0 and "2,1,1/2" in out.splitlines()


def test_table_lambda_zero_is_classical():
    _, a, _ = run("table", "--kind", "stirling2", "--nmax", "4")
    _, b, _ = run("table", "--kind", "stirling2-deg", "--lambda", "0", "--nmax", "4")
    assert a == b


def test_table_json_round_trip():
    code, out, _ = run("table", "--kind", "stirling2-deg", "--lambda=-2/3", "--nmax", "6", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["lambda"] == "-2/3" and d["nmax"] == 6
    for row in d["rows"]:
        q = parse_rational(row["value"])
        assert str(q) == row["value"]


def test_table_parse_error():
    assert run("table", "--kind", "stirling2-deg", "--lambda", "1.5", "--nmax", "2")[0] == 2
    assert run("table", "--kind", "stirling2-deg", "--nmax", "2")[0] == 2


# ---------------------------------------------------------------- verify


def test_verify_tail_sum_both():
    code, out, _ = run("verify", "--identity", "thm2.1b", "--lambda", "1/2", "--y", "1", "--mode", "both")
    assert code == 0
    assert out.startswith("PASS thm2.1b")
    assert "lhs=3/2 rhs=3/2" in out
    assert "lhs=1.5 rhs=1.5" in out


def test_verify_alternating_numeric():
    code, out, _ = run("verify", "--identity", "cor2.2c", "--lambda", "1/2", "--mode", "numeric", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert float(d["results"][0]["lhs"]) == -0.25


def test_verify_non_convergent_exit_2():
    code, out, err = run("verify", "--identity", "thm2.1b", "--lambda", "2", "--y", "1", "--mode", "numeric")
    assert code == 2 and out == ""
    assert "converge" in err.lower()


def test_verify_missing_parameter():
    code, _, err = run("verify", "--identity", "thm2.3", "--lambda", "1/2")
    assert code == 2 and "p" in err


def test_verify_stirling_note_in_json():
    code, out, _ = run("verify", "--identity", "thm2.5", "--lambda", "1/3", "--y", "1/2", "--k", "2", "--format", "json")
    d = json.loads(out)
    assert code == 0 and any("limit" in n for n in d["notes"])
    assert d["params"] == {"lambda": "1/3", "y": "1/2", "k": 2, "tol": 1e-10, "max_terms": 1000}


def test_verify_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "case.json"
    cfg.write_text(json.dumps({"identity": "thm2.3", "lambda": "1/2", "p": 1, "mode": "exact"}))
    code, out, _ = run("verify", "--config", str(cfg), "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["params"]["p"] == 1 and d["mode"] == "exact"
    code, out, _ = run("verify", "--config", str(cfg), "--p", "3", "--lambda=-2/5", "--y", "1/4", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["params"]["p"] == 3 and d["params"]["lambda"] == "-2/5"


def test_verify_config_bad_json(tmp_path):
    cfg = tmp_path / "case.json"
    cfg.write_text("{not json")
    assert run("verify", "--config", str(cfg))[0] == 2
    assert run("verify", "--config", str(tmp_path / "missing.json"))[0] == 2


# -------------------------------------------------------------- converge


def _trace(*argv):
    code, out, _ = run("converge", *argv)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert out.splitlines()[0] == "m,partial_sum,target,abs_error"
    return rows


def test_converge_terminating_reaches_zero():
    rows = _trace("--identity", "thm2.1b", "--lambda", "1/2", "--y", "1", "--terms", "5")
    assert [int(r["m"]) for r in rows] == [1, 2, 3, 4, 5]
    assert float(rows[1]["abs_error"]) == 0.0
    assert all(float(r["abs_error"]) == 0.0 for r in rows[1:])


def test_converge_classical_strictly_decreasing():
    rows = _trace("--identity", "thm2.1b", "--lambda", "0", "--y", "1/2", "--terms", "12")
    errs = [float(r["abs_error"]) for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_converge_alternating_geometric():
    rows = _trace("--identity", "cor2.2c", "--lambda", "1/3", "--terms", "60")
    assert float(rows[-1]["abs_error"]) < 1e-10


def test_converge_guard():
    assert run("converge", "--identity", "thm2.1b", "--lambda", "2", "--y", "1")[0] == 2


# ----------------------------------------------------------------- suite


def test_suite_default_passes():
    code, out, _ = run("suite", "--no-metadata")
    d = json.loads(out)
    assert code == 0
    s = d["summary"]
    assert s["total"] == s["passed"] > 0 and s["failed"] == s["errors"] == 0
    assert set(s["by_identity"]) >= {"thm2.1a", "thm2.1b", "thm2.5", "remark2.6"}
    assert "metadata" not in d


def test_suite_metadata_present_by_default(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"cases": [{"identity": "thm2.1b", "lambda": "1/2"}]}))
    d = json.loads(run("suite", "--config", str(cfg))[1])
    assert "elapsed_seconds" in d["metadata"]


def test_suite_is_deterministic():
    cfg = str(FIXTURES / "desk_cases.json")
    a = run("suite", "--config", cfg, "--no-metadata")
    b = run("suite", "--config", cfg, "--no-metadata", "--jobs", "2")
    assert a[0] == 0 and a == b


def test_suite_filter_to_stirling(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"identity": "thm2.5"}))
    code, out, _ = run("suite", "--config", str(cfg), "--no-metadata")
    d = json.loads(out)
    assert code == 0
    assert {r["identity_id"] for r in d["reports"]} == {"thm2.5"}


def test_suite_invalid_lambda_fails_before_running(tmp_path):
    cfg = tmp_path / "c.json"
    cases = [{"identity": "thm2.1b", "lambda": "1/2"}, {"identity": "thm2.1b", "lambda": "0.5"}]
    cfg.write_text(json.dumps({"cases": cases}))
    code, out, err = run("suite", "--config", str(cfg))
    assert code == 2 and out == ""
    assert "case 1" in err


def test_suite_corrupted_expected_value(tmp_path):
    data = json.loads((FIXTURES / "desk_cases.json").read_text())
    for i, entry in enumerate(data["cases"]):
        if "expected" not in entry:
            continue
        bad = json.loads(json.dumps(data))
        bad["cases"][i]["expected"] = str(parse_rational(entry["expected"]) + parse_rational("1/1000"))
        cfg = tmp_path / f"bad{i}.json"
        cfg.write_text(json.dumps(bad))
        code, out, _ = run("suite", "--config", str(cfg), "--no-metadata")
        d = json.loads(out)
        assert code == 1
        failed = [j for j, r in enumerate(d["reports"]) if not r["passed"]]
        assert failed == [i]


def test_suite_error_only_exit_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"cases": [{"identity": "thm2.1b", "lambda": "2", "y": "1", "mode": "numeric"}]}))
    code, out, _ = run("suite", "--config", str(cfg), "--no-metadata")
    d = json.loads(out)
    assert code == 2
    assert d["summary"]["errors"] == 1 and "NonConvergenceError" in d["reports"][0]["error"]


def test_suite_csv():
    code, out, _ = run("suite", "--config", str(FIXTURES / "desk_cases.json"), "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 10
    assert all(r["passed"] == "True" for r in rows)
