import numpy as np
import pytest

from magflow.algebra import heisenberg, ht_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def h1():
    return heisenberg([1.0])


@pytest.fixture
def ht():
    return ht_algebra()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get(
        "tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.format_results(mod.RESULTS):
        terminalreporter.write_line(line)
