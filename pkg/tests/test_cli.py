from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from hodgecyc.cli import main

HERE = Path(__file__).parent
FIX = HERE / "fixtures"
GOLDEN = HERE / "golden"


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def result(*argv: str) -> dict:
    code, out, err = run(*argv)
    assert code == 0, err
    return json.loads(out)["result"]


@pytest.mark.parametrize("fixture, n, dim", [("lambda2.json", 2, 2), ("field.json", 1, 0),
                                              ("gaussian.json", 2, 0), ("split.json", 3, 0),
                                              ("tensor_dual.json", 2, 5)])
def test_hh_dims(fixture, n, dim):
    assert result("hh", FIX / fixture, "--degree", n)["dim"] == dim


def test_hh_hodge_and_map():
    r = result("hh", FIX / "lambda3.json", "--degree", 2, "--hodge", "--map", FIX / "lambda1.json")
    assert r["hodge"] == {"1": 3, "2": 0}
    assert r["map"]["rank"] == 0
    assert r["map"]["matrix"] == [["0", "0", "0"]]


@pytest.mark.parametrize("argv, dim", [
    (("field.json", "--degree", 2), 1),
    (("dual.json", "--degree", 1, "--relative", "e"), 0),
    (("dual.json", "--degree", 0, "--relative", "e"), 1),
    (("dual.json", "--degree", 3, "--relative", "e", "--as-hn"), 1),
])
def test_hc_dims(argv, dim):
    assert result("hc", FIX / argv[0], *argv[1:])["dim"] == dim


def test_hc_hodge_sums():
    r = result("hc", FIX / "lambda2.json", "--degree", 2, "--relative", "x", "--hodge")
    assert sum(r["hodge"].values()) == r["dim"] == 2


def test_prohkr_examples():
    r = result("prohkr", FIX / "tower_x.json", "--p", 1, "--m-max", 3, "--search-max", 8)
    assert r["certificate"]["status"] == "certified"
    assert r["witness_bound_2m_plus_1"]
    r = result("prohkr", FIX / "tower_x.json", "--p", 0, "--search-max", 8)
    assert r["certificate"]["status"] == "certified"
    r = result("prohkr", FIX / "tower_x.json", "--p", 1, "--m-max", 3, "--search-max", 2)
    assert r["certificate"]["status"] == "inconclusive"


def test_volodin_examples():
    r = result("volodin", FIX / "dual.json", "--ideal", "e", "--n", 2, "--k", 1, "--m", 2)
    assert r["equal"]
    r = result("volodin", FIX / "dual.json", "--ideal", "e", "--n", 2, "--k", 2, "--m", 1)
    assert r["theta_surjective"]


def test_volodin_golden():
    code, out, _ = run("volodin", FIX / "dual.json", "--ideal", "e", "--n", 2, "--k", 2, "--m", 2)
    assert code == 0
    assert out == (GOLDEN / "volodin_dual_n2_k2_m2.json").read_text()


def test_report_envelope():
    code, out, _ = run("hh", FIX / "lambda1.json", "--degree", 1)
    rep = json.loads(out)
    assert set(rep) == {"command", "args", "input_sha256", "conventions", "version", "result"}
    assert rep["conventions"]["version"] == "ct-1"
    assert "connes_B" in rep["conventions"]
    assert len(rep["input_sha256"]) == 64
    assert out == json.dumps(rep, sort_keys=True, indent=2) + "\n"


def test_timing_is_opt_in():
    code, out, _ = run("hh", FIX / "lambda1.json", "--degree", 1, "--timing")
    assert "timing_seconds" in json.loads(out)


def test_table_format():
    code, out, _ = run("hh", FIX / "lambda2.json", "--degree", 2, "--format", "table")
    assert code == 0
    assert "result.dim: 2" in out.splitlines()


def test_relation_parse_error_cites_line_and_column():
    code, _, err = run("hh", FIX / "bad_relation.json", "--degree", 1)
    assert code == 2
    # the '*' in line 4: '  "relation": "x^2 + * 1"'
    assert "line 4, column 22" in err


def test_json_syntax_error_cites_line_and_column():
    code, _, err = run("hh", FIX / "bad_json.json", "--degree", 1)
    assert code == 2
    assert "line 3, column 2" in err


@pytest.mark.parametrize("argv", [
    ("hh", "missing.json", "--degree", 1),
    ("hh", FIX / "lambda1.json", "--degree", -1),
    ("hc", FIX / "lambda1.json", "--degree", 1, "--as-hn"),
    ("hc", FIX / "split.json", "--degree", 1, "--relative", "x"),
    ("hh", FIX / "tower_x.json", "--degree", 1),
    ("hh", FIX / "lambda1.json"),
])
def test_input_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_budget_error_exit_3():
    code, _, err = run("hh", FIX / "lambda2.json", "--degree", 9, "--budget", 100)
    assert code == 3
    assert "required 3072" in err


@pytest.mark.parametrize("suite", ["idempotents", "towers", "ce", "mixed-identities"])
def test_check_suites_pass(suite):
    code, out, _ = run("check", "--suite", suite)
    assert code == 0
    assert json.loads(out)["result"]["passed"]


def test_check_corrupted_fixture_fails_first():
    code, out, _ = run("check", "--suite", "all", "--fixture", FIX / "corrupted.json")
    assert code == 4
    failure = json.loads(out)["result"]["first_failure"]
    assert failure["check"].startswith("structure constants of corrupted")
    assert "associative" in failure["message"]


def test_other_document_kinds():
    assert result("hh", FIX / "monomial_xy.json", "--degree", 0)["dim"] == 4
