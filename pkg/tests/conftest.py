import os

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def fixtures_dir() -> str:
    return FIXTURES


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)
