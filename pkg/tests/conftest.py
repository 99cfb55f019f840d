import numpy as np
import pytest

from gstsparse.graph import from_edges, gnp_random_graph


@pytest.fixture
def k3():
    return from_edges([(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def path3():
    return from_edges([(0, 1), (1, 2)])


@pytest.fixture
def star4():
    return from_edges([(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def hub5():
    """Node A=0 with neighbors B=1, C=2, D=3, E=4 and the triangle A-B-C."""
    return from_edges([(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])


def random_graphs(count, seed, n_range=(3, 10), p_range=(0.2, 0.7), confidence=True):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(*n_range, endpoint=True))
        conf = (0.5, 1.0) if confidence and i % 2 else None
        yield gnp_random_graph(n, float(rng.uniform(*p_range)), int(rng.integers(1 << 31)), confidence=conf)


# --- acceptance summary: one PASS/FAIL line per criterion -----------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    ok = _CRITERIA.get(number, (title, True))[1]
    if rep.when == "call" or rep.failed:
        ok = ok and rep.passed
        _CRITERIA[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}")
