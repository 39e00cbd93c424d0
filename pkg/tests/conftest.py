import pytest

from sosbias import sieve

DESK_N = 10**7


def pytest_addoption(parser):
    parser.addoption("--run-long", action="store_true", default=False, help="run the N = 10^8 checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-long"):
        return
    skip = pytest.mark.skip(reason="needs --run-long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def desk_blocks():
    """S, omega and Omega for 1..10^7, computed once per session without touching any cache."""
    return sieve.sieve(DESK_N, sieve.KIND_ALL, cache_dir=None, workers=1)


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv(sieve.CACHE_ENV, raising=False)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
