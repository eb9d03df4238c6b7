import pathlib

import pytest

from ctrlsel import load_instance

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def demo10():
    return load_instance(FIXTURES / "demo10.json")


@pytest.fixture(scope="session")
def straddle3():
    return load_instance(FIXTURES / "straddle3.json")


@pytest.fixture(scope="session")
def chain3():
    return load_instance(FIXTURES / "chain3.json")


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES
