import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS_DIR.parent / "src"))


@pytest.fixture
def fixtures_dir():
    return TESTS_DIR / "fixtures"


@pytest.fixture
def golden_dir():
    return TESTS_DIR / "fixtures" / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--update-goldens", action="store_true", default=False,
        help="rewrite tests/fixtures/golden from the current outputs",
    )


@pytest.fixture
def assert_golden(request, golden_dir):
    """
    Compare produced bytes with a golden file. A golden that does not exist yet
    (or every golden, under --update-goldens) is written from the output and the
    test is skipped; commit the new file to freeze it.
    """
    update = request.config.getoption("--update-goldens")

    def check(name, produced):
        path = golden_dir / name
        if update or not path.exists():
            path.write_bytes(produced)
            pytest.skip(f"golden file {name} written; rerun to compare against it")
        assert produced == path.read_bytes(), f"output no longer matches golden file {name}"

    return check
