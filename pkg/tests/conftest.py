import os
from pathlib import Path

import pytest

from selberg_lab.coefficients.cache import cache_dir

ZEROS_ENV = "SELBERG_LAB_ZETA_ZEROS"


def zeta_zeros_path():
    """First 10^4 zeta zero ordinates: $SELBERG_LAB_ZETA_ZEROS, else the file
    written by scripts/make_zeta_zeros.py into the cache directory."""
    env = os.environ.get(ZEROS_ENV)
    if env:
        return Path(env)
    return cache_dir() / "zeta_zeros_10000.txt"


@pytest.fixture(scope="session")
def zeros_file():
    path = zeta_zeros_path()
    if not path.is_file():
        pytest.fail(
            f"no zeta zero list at {path}; run `python3 scripts/make_zeta_zeros.py {path}` "
            f"or point {ZEROS_ENV} at a file of the first 10^4 ordinates"
        )
    return path


@pytest.fixture(scope="session")
def zeta_zeros(zeros_file):
    from selberg_lab.zero_stats import load_zeros

    return load_zeros(zeros_file)


@pytest.fixture
def tmp_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("SELBERG_LAB_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
