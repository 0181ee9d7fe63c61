from pathlib import Path

import pytest

from dtd.reasoner import STATS
from dtd.scenario import corpus_dir, load_scenario

CORPUS = corpus_dir()


@pytest.fixture(autouse=True)
def _reset_stats():
    STATS.reset()
    yield


@pytest.fixture(scope="session")
def bank():
    return load_scenario(CORPUS / "bank")


@pytest.fixture(scope="session")
def sports():
    return load_scenario(CORPUS / "sports")


def scenario(name):
    return load_scenario(CORPUS / name)


def corpus_path(name) -> Path:
    return CORPUS / name


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
