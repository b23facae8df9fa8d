import functools

import pytest
from hypothesis import settings

from alphapart.core import AlphaParams
from alphapart.exact import build_count_table

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def cached_table(alpha: str, n_max: int):
    return build_count_table(AlphaParams.parse(alpha), n_max)


@pytest.fixture(scope="session")
def half():
    return AlphaParams.parse("1/2")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
