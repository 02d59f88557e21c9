import numpy as np
import pytest
from hypothesis import settings

from rbforge.corpus import corpus_algebras, corpus_systems

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def algebras():
    return corpus_algebras()


@pytest.fixture(scope="session")
def systems():
    return corpus_systems()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS.values():
        terminalreporter.write_line(line)
