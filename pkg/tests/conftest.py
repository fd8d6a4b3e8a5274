from pathlib import Path

import pytest

from hrg2pg.formats import read_file
from hrg2pg.grammar import enumerate_graphs
from hrg2pg.plr import build_table
from hrg2pg.positional import translate_grammar

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str):
    return read_file(FIXTURES / name)


@pytest.fixture(scope="session")
def cycle():
    return load("cycle.hrg")


@pytest.fixture(scope="session")
def cycle_pg(cycle):
    return translate_grammar(cycle)


@pytest.fixture(scope="session")
def cycle_table(cycle_pg):
    return build_table(cycle_pg)


@pytest.fixture(scope="session")
def cycle_enum6(cycle):
    return enumerate_graphs(cycle, 6)


@pytest.fixture(scope="session")
def fig1():
    return load("fig1.hrg")


@pytest.fixture(scope="session")
def fig1_h():
    return load("fig1-H.hg")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): one acceptance criterion")


_CRITERIA: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when == "teardown":
        return
    number, title = marker.args
    failed = rep.failed or (rep.when == "setup" and rep.skipped)
    if rep.when == "call" or failed:
        _CRITERIA[number] = (title, "FAIL" if failed else "PASS", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict, seconds = _CRITERIA[number]
        terminalreporter.write_line(f"{verdict} criterion {number}: {title} ({seconds:.2f} s)")
