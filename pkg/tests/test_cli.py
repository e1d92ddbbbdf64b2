import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from ontofdd.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from ontofdd.fixtures import education_fixture

FIX = education_fixture()
BROKEN = education_fixture(broken=True)
CONFIG = str(FIX.directory / "fdd.toml")


def tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def run(*argv):
    return main([str(a) for a in argv])


def test_report_matches_golden(tmp_path):
    assert run("report", "--config", CONFIG, "--out", tmp_path) == EXIT_OK
    assert tree(tmp_path) == tree(FIX.expected_dir / "report")


def test_infer_matches_golden(tmp_path):
    assert run("infer", "--config", CONFIG, "--out", tmp_path) == EXIT_OK
    assert tree(tmp_path) == tree(FIX.expected_dir / "infer")


def test_query_matches_golden(tmp_path, capsys):
    assert run("query", "--config", CONFIG, "-q", FIX.directory / "owner-query.sqwrl", "--out", tmp_path) == EXIT_OK
    assert capsys.readouterr().out == "?I\t?P\ni1\tPriya\n"
    assert tree(tmp_path) == tree(FIX.expected_dir / "query")


def test_validate_clean_and_broken(tmp_path):
    assert run("validate", "-o", FIX.ontology_path, "-r", FIX.rules_path, "--out", tmp_path / "ok") == EXIT_OK
    assert json.loads((tmp_path / "ok" / "violations.json").read_text()) == []
    assert run("validate", "-o", BROKEN.ontology_path, "--out", tmp_path / "bad") == EXIT_FAILED
    [v] = json.loads((tmp_path / "bad" / "violations.json").read_text())
    assert v["code"] == "DISJOINT_MEMBERSHIP" and v["subject"].endswith("#i1")


def test_missing_file_is_usage_error(tmp_path, capsys):
    assert run("validate", "-o", tmp_path / "nope.ofnx", "--out", tmp_path) == EXIT_USAGE
    assert "nope.ofnx" in capsys.readouterr().err


def test_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.ofnx"
    bad.write_text("Ontology(<urn:x>\n  Declaration(Class(:A)\n")
    assert run("validate", "-o", bad, "--out", tmp_path / "o") == EXIT_USAGE
    assert "bad.ofnx:" in capsys.readouterr().err


def test_unsafe_rule_exits_one(tmp_path):
    rules = tmp_path / "r.swrl"
    rules.write_text("Person(?p) -> Employee(?q)\n")
    assert run("infer", "-o", FIX.ontology_path, "-r", rules, "--out", tmp_path / "o") == EXIT_FAILED


def test_no_command_is_usage_error():
    assert run() == EXIT_USAGE
    assert run("frobnicate") == EXIT_USAGE


def test_plan_requires_start_date(tmp_path):
    assert run("plan", "-o", FIX.ontology_path, "--out", tmp_path) == EXIT_USAGE


def test_plan_unassigned_exits_one(tmp_path):
    onto = tmp_path / "o.ofnx"
    onto.write_text(
        "Prefix(:=<urn:t#>)\nOntology(<urn:t>\n Declaration(Class(:A)) Declaration(Class(:B))\n"
        " Declaration(ObjectProperty(:link)) ObjectPropertyDomain(:link :A) ObjectPropertyRange(:link :B)\n)\n"
    )
    args = ("plan", "-o", onto, "--start-date", "2024-01-01", "--out", tmp_path / "p")
    assert run(*args) == EXIT_FAILED
    assert run(*args, "--default-owner", "PM") == EXIT_OK
    plan = json.loads((tmp_path / "p" / "plan.json").read_text())
    assert plan["schedule"][0]["owner"] == "PM"


def test_flag_overrides_config(tmp_path):
    assert run("plan", "--config", CONFIG, "--iteration-days", "7", "--out", tmp_path) == EXIT_OK
    plan = json.loads((tmp_path / "plan.json").read_text())
    assert plan["overall_completion"] == "2024-01-08"


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('ontology = "x.ofnx"\ncolour = "red"\n')
    assert run("validate", "--config", cfg) == EXIT_USAGE


def test_config_paths_are_relative_to_config(tmp_path):
    shutil.copytree(FIX.directory, tmp_path / "fx")
    out = tmp_path / "elsewhere"
    assert run("features", "--config", tmp_path / "fx" / "fdd.toml", "--out", out) == EXIT_OK
    assert "Offering of StudyProgram by Department" in (out / "features.md").read_text()


@pytest.mark.parametrize("fmt, present, absent", [("json", "features.json", "features.md"), ("markdown", "features.md", "features.json")])
def test_format_option(tmp_path, fmt, present, absent):
    assert run("features", "-o", FIX.ontology_path, "--format", fmt, "--out", tmp_path) == EXIT_OK
    assert (tmp_path / present).exists() and not (tmp_path / absent).exists()


def test_codegen_targets(tmp_path):
    assert run("codegen", "-o", FIX.ontology_path, "--out", tmp_path / "oo") == EXIT_OK
    assert "    String getFirstName();" in (tmp_path / "oo" / "Person.txt").read_text().splitlines()
    assert run("codegen", "-o", FIX.ontology_path, "--target", "json", "--out", tmp_path / "js") == EXIT_OK
    assert sorted(p.name for p in (tmp_path / "js").iterdir()) == ["domain-model.json"]


def test_strict_typing_flag(tmp_path):
    onto = tmp_path / "s.ofnx"
    onto.write_text(
        "Prefix(:=<urn:t#>)\nOntology(<urn:t>\n Declaration(Class(:Dept)) Declaration(Class(:Prog))\n"
        " Declaration(ObjectProperty(:offers)) ObjectPropertyDomain(:offers :Dept) ObjectPropertyRange(:offers :Prog)\n"
        " Declaration(NamedIndividual(:s1)) Declaration(NamedIndividual(:p1)) ClassAssertion(:Prog :p1)\n"
        " ObjectPropertyAssertion(:offers :s1 :p1)\n)\n"
    )
    assert run("validate", "-o", onto, "--out", tmp_path / "i") == EXIT_OK
    assert run("validate", "-o", onto, "--typing", "strict", "--out", tmp_path / "s") == EXIT_FAILED
    codes = [v["code"] for v in json.loads((tmp_path / "s" / "violations.json").read_text())]
    assert codes == ["STRICT_DOMAIN_VIOLATION"]


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "ontofdd", "--help"], capture_output=True, text=True)
    assert done.returncode == 0 and "report" in done.stdout
