import pathlib

import pytest

from vdmn import corpus_expectations, load_corpus, parse_file

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def expectations():
    return corpus_expectations()


@pytest.fixture(scope="session")
def everything():
    return parse_file(FIXTURES / "everything.vdt").expect()


@pytest.fixture(scope="session")
def gross_profit(corpus):
    return corpus.get("gross_profit")


@pytest.fixture(scope="session")
def roce(corpus):
    return corpus.get("roce")
