from importlib.resources import files

import pytest

from sitcalc import parse_scenario, parse_theory

# criterion number -> (title, outcome); filled by the report hook below
ACCEPTANCE: dict = {}


def data_text(name: str) -> str:
    return files("sitcalc").joinpath("data", name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def robot():
    return parse_theory(data_text("robot.sitc"))


@pytest.fixture(scope="session")
def robot_script(robot):
    return parse_scenario(data_text("s0to8.scn"), robot)


@pytest.fixture(scope="session")
def drop_theory():
    return parse_theory(data_text("drop.sitc"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    prev = ACCEPTANCE.get(n, (title, True))[1]
    ACCEPTANCE[n] = (title, prev and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
