from importlib import resources

import pytest

from speechlink.annotator import Annotator
from speechlink.kg import load_graph, parse_ntriples
from speechlink.surface import build_index

DBR = "http://dbpedia.org/resource/"
DBO = "http://dbpedia.org/ontology/"
BERLIN = DBR + "Berlin"
GERMANY = DBR + "Germany"
MUELLER = DBR + "Michael_Müller"
CAPITAL = DBO + "capital"
COUNTRY = DBO + "country"

FIXTURE_TEXT = resources.files("speechlink.data").joinpath("fixture.nt").read_text("utf-8")
FIXTURE_PATH = str(resources.files("speechlink.data").joinpath("fixture.nt"))

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[str] = []


@pytest.fixture(scope="session")
def fixture_triples():
    return parse_ntriples(FIXTURE_TEXT)


@pytest.fixture(scope="session")
def graph(fixture_triples):
    return load_graph(fixture_triples)


@pytest.fixture(scope="session")
def index(graph):
    return build_index(graph)


@pytest.fixture(scope="session")
def annotator(graph, index):
    return Annotator(graph, index)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
