import json
from pathlib import Path

import pytest

from affectaware.model import BUNDLED, Registry, bundled_path, load_bundled

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def bundled_defs():
    return load_bundled()


@pytest.fixture(scope="session")
def registry(bundled_defs):
    return Registry(bundled_defs)


@pytest.fixture(scope="session")
def gs(registry):
    return registry["GS"]


@pytest.fixture(scope="session")
def raw_tables():
    """Definition files as plain JSON, for oracles that must not reuse the parser."""
    return {json.loads(bundled_path(n).read_text())[0]["code"]: json.loads(bundled_path(n).read_text())[0]
            for n in BUNDLED}


@pytest.fixture(scope="session")
def published_grids():
    return json.loads((FIXTURES / "published_confusion.json").read_text())


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
