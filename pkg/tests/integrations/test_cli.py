import json

import pytest

from primindex import __version__
from primindex.main import cli


def _invoke(runner, *args):
    return runner.invoke(cli, list(args), catch_exceptions=False)


def test_version(runner):
    result = _invoke(runner, "--version")
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_index_reports_discrepancy_for_a3b3(runner, tmp_path):
    result = _invoke(runner, "index", "--word", "a^3 b^3")
    assert result.exit_code == 4
    assert result.stdout.strip() == "2"
    saved = tmp_path / "certificates" / "primitivity_a_3_b_3_r2.json"
    data = json.loads(saved.read_text(encoding="utf-8"))
    assert data["discrepancy"]["claimed"] == 3
    assert data["reverified"] is True


def test_index_simplicity(runner):
    result = _invoke(runner, "index", "--kind", "simp", "--word", "a^4 b^4", "--no-save")
    assert result.exit_code == 0
    assert result.stdout.strip() == "2"


def test_index_json_output(runner):
    result = _invoke(runner, "index", "--word", "a b", "--format", "json", "--no-save")
    assert result.exit_code == 0
    cert = json.loads(result.stdout)
    assert cert["index"] == 1
    assert cert["evidence"]["path"] == "single_occurrence"


def test_index_both_kinds(runner):
    result = _invoke(runner, "index", "--kind", "both", "--word", "a^2 b^2", "--no-save")
    assert result.exit_code == 0
    assert "primitivity 2" in result.stdout


def test_index_explicit_output_path(runner, tmp_path):
    target = tmp_path / "cert.json"
    result = _invoke(runner, "index", "--word", "a^2 b^2", "--output", str(target))
    assert result.exit_code == 0
    assert json.loads(target.read_text(encoding="utf-8"))["index"] == 2


@pytest.mark.parametrize(
    "args,code",
    [
        (("--word", "a^2 b^2", "--cap", "1"), 2),
        (("--word", "a^2 b^2", "--max-degree", "1"), 3),
        (("--word", "a $"), 64),
        (("--word", "x3", "--rank", "2"), 64),
    ],
)
def test_index_exit_codes(runner, args, code):
    result = _invoke(runner, "index", "--no-save", *args)
    assert result.exit_code == code


def test_enumerate_counts(runner):
    result = _invoke(runner, "enumerate", "--degree", "3", "--count-only")
    assert result.exit_code == 0
    assert result.stdout.strip() == "13"


def test_enumerate_streams_json_lines(runner):
    result = _invoke(runner, "enumerate", "--degree", "2")
    lines = [json.loads(line) for line in result.stdout.splitlines()]
    assert result.exit_code == 0
    assert len(lines) == 4
    assert lines[-1] == {"count": 3}
    assert all(line["degree"] == 2 for line in lines[:-1])


def test_enumerate_with_containment_filter(runner):
    result = _invoke(runner, "enumerate", "--degree", "2", "--contains", "a", "--count-only")
    assert result.stdout.strip() == "1"


def test_enumerate_guard(runner):
    assert _invoke(runner, "enumerate", "--degree", "9").exit_code == 3


def test_verify_thm4(runner):
    result = _invoke(runner, "verify", "thm4", "--n", "2..5")
    assert result.exit_code == 0
    assert "4/4 passed" in result.stdout


def test_verify_lemma1_and_power(runner):
    assert _invoke(runner, "verify", "lemma1", "--d", "2..4").exit_code == 0
    assert _invoke(runner, "verify", "power", "--degree", "1..3").exit_code == 0
    assert _invoke(runner, "verify", "nonsimple", "--exponents", "2,3").exit_code == 0


def test_verify_thm1_json(runner):
    result = _invoke(runner, "verify", "thm1", "--n", "2,3,12", "--format", "json")
    assert result.exit_code == 0
    rows = json.loads(result.stdout)
    assert [row["passed"] for row in rows] == [True, True, True]


def test_verify_prop4_flags_discrepancy(runner):
    result = _invoke(runner, "verify", "prop4", "--n", "3", "--t", "3")
    assert result.exit_code == 4
    assert "DISCREPANCY" in result.stdout


def test_verify_usage_errors(runner):
    assert _invoke(runner, "verify", "prop4", "--n", "3").exit_code == 64
    assert _invoke(runner, "verify", "thm1", "--n", "9..2").exit_code == 64


def test_bounds_report(runner):
    result = _invoke(runner, "bounds", "--m-max", "500", "--n-max", "500", "--i-max", "12")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["rosser_schoenfeld"]["argmax_ratio"] == 113
    assert 9 in report["sandwich"]["flagged"]


def test_bounds_csv(runner):
    result = _invoke(runner, "bounds", "--csv", "lcm", "--i-max", "4")
    assert result.exit_code == 0
    assert result.stdout.splitlines() == ["i,n_i,d_n_i", "1,1,2", "2,2,3", "3,6,4", "4,12,5"]


def test_construct_lemma1(runner):
    result = _invoke(runner, "construct", "lemma1", "--d", "3")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["Y"] == ["a^3", "a b", "a^2 b^2", "b^3"]


def test_construct_glued_dot(runner):
    result = _invoke(runner, "construct", "glued", "--n", "3", "--t", "3", "--d", "2", "--dp", "2", "--format", "dot")
    assert result.exit_code == 0
    assert "doublecircle" in result.stdout


def test_construct_power_from_perms(runner):
    assert _invoke(runner, "construct", "power", "--perms", "[[1,0],[1,0]]").exit_code == 0
    assert _invoke(runner, "construct", "power", "--perms", "nonsense").exit_code == 64
    assert _invoke(runner, "construct", "glued", "--n", "3").exit_code == 64


def test_schema(runner):
    result = _invoke(runner, "schema")
    assert result.exit_code == 0
    assert "covers_examined_at_index" in json.loads(result.stdout)["properties"]


@pytest.mark.parametrize(
    "args",
    [
        ("index", "--word", "a^6 b^6", "--format", "json", "--no-save"),
        ("verify", "thm2", "--i", "3", "--format", "json"),
    ],
)
def test_json_output_is_byte_identical_across_runs(runner, args):
    first = _invoke(runner, *args)
    second = _invoke(runner, *args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout_bytes == second.stdout_bytes
    assert "elapsed" not in first.stdout
