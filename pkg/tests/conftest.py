import sys

import pytest

from heckewind.manin import build_space


@pytest.fixture(scope="session")
def space_cache():
    cache = {}

    def get(level, k):
        if (level, k) not in cache:
            cache[level, k] = build_space(level, k)
        return cache[level, k]

    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
