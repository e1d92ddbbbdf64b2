import pytest

from ontofdd.fixtures import education_fixture
from ontofdd.parser import SourceDocument, parse_ontology_text, parse_query, parse_rules

EDU = "http://example.org/edu#"
HEADER = "Prefix(:=<http://example.org/edu#>)\nOntology(<http://example.org/education>\n"


def onto(body: str):
    """Parse an ontology whose axioms are ``body`` (default prefix = edu#)."""
    return parse_ontology_text(HEADER + body + "\n)\n")


def rules(text: str, ontology):
    return parse_rules(SourceDocument("<rules>", text, "rules"), ontology)


def query(text: str, ontology):
    return parse_query(SourceDocument("<query>", text, "query"), ontology)


def e(name: str) -> str:
    return EDU + name


@pytest.fixture
def edu_fixture():
    return education_fixture()


@pytest.fixture
def edu(edu_fixture):
    return parse_ontology_text(edu_fixture.ontology_text, str(edu_fixture.ontology_path))


@pytest.fixture
def edu_rules(edu, edu_fixture):
    return rules(edu_fixture.rules_text, edu)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
