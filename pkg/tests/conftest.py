import sys
from importlib.resources import files
from pathlib import Path

import pytest

from kger.textformat import load_graph, parse_schema

TESTS = Path(__file__).parent
DATA = TESTS / "data"
PKG_DATA = files("kger").joinpath("data")
sys.path.insert(0, str(TESTS))


def package_text(name: str) -> str:
    return PKG_DATA.joinpath(name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def running():
    return parse_schema(package_text("running_example.kger"))


@pytest.fixture(scope="session")
def employee():
    return parse_schema(package_text("employee.kger"))


@pytest.fixture(scope="session")
def g0(running):
    return load_graph(package_text("g0.json"), running)
