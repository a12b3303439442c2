import json
from fractions import Fraction

import pytest

from imapk.cli import main
from imapk.errors import SpecSemanticError, SpecSyntaxError
from imapk.report import map_from_echo, run, to_json
from imapk.specfile import parse_spec

TENT_SPEC = "map { family = tent }\n"

GOLDEN_BETA_SPEC = """\
field { poly = [-1,-1,1]; iso = [1,2] }
map { family = beta; beta = alg:[0,1] }
"""

TENT_EXPLICIT = """\
map {
  partition = [0, 1/2, 1]
  branch = {slope=2,intercept=0}
  branch = {slope=-2,intercept=2}
}
"""

MULTIMODAL_SPEC = """\
map {
  partition = [0, 1/3, 2/3, 1]
  branch = { slope = 9/5, intercept = 2/5 }
  branch = { slope = -3, intercept = 2 }
  branch = { slope = 9/5, intercept = -6/5 }
}
"""


def test_parse_tent_family():
    spec = parse_spec(TENT_SPEC)
    assert spec.family == "tent"
    assert len(spec.map.branches) == 2


def test_parse_golden_beta():
    spec = parse_spec(GOLDEN_BETA_SPEC)
    assert spec.family == "beta"
    assert spec.map.branches[0].slope == spec.field.alpha()


def test_parse_explicit_tent(tent):
    spec = parse_spec(TENT_EXPLICIT)
    assert spec.family is None
    assert spec.map == tent


def test_parse_options():
    spec = parse_spec(
        "map { family = tent }\n"
        "options { cap = 500; tol = 1/1000; assert_cyclic = true }\n"
    )
    assert spec.options == {
        "cap": 500,
        "tol": Fraction(1, 1000),
        "assert_cyclic": True,
    }


def test_syntax_error_location():
    with pytest.raises(SpecSyntaxError) as err:
        parse_spec("map { family = = }")
    assert err.value.line == 1


def test_semantic_errors():
    with pytest.raises(SpecSemanticError):
        parse_spec("map { family = nosuch }")
    with pytest.raises(SpecSemanticError):
        parse_spec("map { family = tent }\noptions { wat = 1 }")
    with pytest.raises(SpecSemanticError):
        parse_spec("map { family = beta; beta = alg:[0,1] }")  # no field declared
    with pytest.raises(SpecSemanticError):
        parse_spec("options { cap = 10 }")  # no map section


def test_run_all_tent_report():
    spec = parse_spec(TENT_SPEC)
    report, code = run("all", spec)
    assert code == 0
    assert report["markov"]["data"]["matrix"] == [[1, 1], [1, 1]]
    assert report["classification"]["verdict"] == "cuntz_algebra"
    assert report["classification"]["index"] == 2
    assert report["entropy"]["exact_s"] == "2"
    assert report["kgroups"]["incidence_route"]["k0"] == {
        "torsion": [],
        "free_rank": 0,
    }


def test_report_json_round_trip_and_determinism():
    spec1 = parse_spec(GOLDEN_BETA_SPEC)
    report1, _ = run("all", spec1)
    text1 = to_json(report1)
    spec2 = parse_spec(GOLDEN_BETA_SPEC)
    report2, _ = run("all", spec2)
    text2 = to_json(report2)
    assert text1 == text2
    parsed = json.loads(text1)
    rebuilt = map_from_echo(parsed["map"])
    assert rebuilt == spec1.map


def test_refusal_exit_code(tmp_path, capsys):
    path = tmp_path / "multimodal.imapk"
    path.write_text(MULTIMODAL_SPEC)
    code = main(["classify", str(path), "--cap", "400", "--json"])
    out = capsys.readouterr().out
    assert code == 2
    report = json.loads(out)
    assert report["refusals"][0]["flag"] == "--assert-orbit-infinite"
    code = main(["classify", str(path), "--cap", "400", "--assert-orbit-infinite", "--json"])
    out = capsys.readouterr().out
    assert code == 0
    report = json.loads(out)
    assert report["kgroups"]["family_route"]["k0"]["free_rank"] == 2


def test_cli_markov_command(tmp_path, capsys):
    path = tmp_path / "tent.imapk"
    path.write_text(TENT_SPEC)
    code = main(["markov", str(path), "--json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "markov"
    assert "kgroups" not in report


def test_cli_partition_flag(tmp_path, capsys):
    path = tmp_path / "realization.imapk"
    path.write_text("map { family = markov_realization; matrix = [[0,1,1],[1,0,1],[1,1,0]] }\n")
    code = main(["ktheory", str(path), "--partition", "[0,1/3,2/3,1]", "--json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    checks = {c["check"]: c["status"] for c in report["consistency"]}
    assert checks["kgroups invariant under Markov partition refinement"] == "pass"
    assert report["markov"]["user_partition"]["matrix"] == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]


def test_cli_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.imapk"
    path.write_text("map { partition = [0, 1]; branch = {slope=3, intercept=0} }\n")
    code = main(["all", str(path)])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cli_missing_file(capsys):
    assert main(["all", "/nonexistent/x.imapk"]) == 1


def test_quoted_long_scalar_form():
    spec = parse_spec(
        'field { poly = [-2,0,1]; iso = [1,2] }\n'
        'map { family = restricted_tent; '
        's = "poly:[-2,0,1]; iso:[1,2]; elem:[0,1]" }\n'
    )
    assert spec.family == "restricted_tent"
    assert spec.map.branches[0].slope == spec.field.alpha()
