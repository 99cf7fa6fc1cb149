import numpy as np
import pytest
from hypothesis import strategies as st

from latcheck.lattice import LatticeElement

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.append((mark.args[0], mark.args[1], rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, outcome in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}  {status}  {text}")


finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
small_ints = st.integers(min_value=-9, max_value=9)


@st.composite
def elements(draw, dim=None, values=finite):
    d = dim if dim is not None else draw(st.integers(1, 6))
    return LatticeElement(draw(st.lists(values, min_size=d, max_size=d)))


@st.composite
def element_tuples(draw, count, values=finite):
    d = draw(st.integers(1, 6))
    return [draw(elements(dim=d, values=values)) for _ in range(count)]


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
