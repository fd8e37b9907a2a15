from pathlib import Path

import pytest

import pathdx

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden_path():
    return lambda name: GOLDEN_DIR / name


@pytest.fixture(scope="session")
def fixture_text() -> str:
    return pathdx.fixture_kb_text()


@pytest.fixture(scope="session")
def fixture_kb(fixture_text):
    result = pathdx.parse_kb(fixture_text)
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.kb
