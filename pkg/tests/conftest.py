from importlib.resources import files

import pytest

from hpxf.kernel import Theory
from hpxf.planner import parse_plan


def data_text(name):
    return files("hpxf").joinpath("data", name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def wheelchair_text():
    return data_text("wheelchair.hpx")


@pytest.fixture(scope="session")
def wheelchair(wheelchair_text):
    return Theory.from_text(wheelchair_text)


@pytest.fixture(scope="session")
def example_plan():
    return parse_plan(data_text("example1.plan"))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
