import functools

import numpy as np
import pytest

from robinsym import grid


@functools.lru_cache(maxsize=None)
def cached_domain(kind: str, h: float):
    if kind == "disk":
        return grid.disk(1.0, h)
    if kind == "square":
        return grid.square(1.0, h)
    if kind == "rect":
        return grid.rectangle(2**0.5, 2**-0.5, h)
    if kind == "lshape":
        return grid.l_shape(h)
    raise KeyError(kind)


@pytest.fixture
def disk128():
    return cached_domain("disk", 1 / 128)


@pytest.fixture
def square128():
    return cached_domain("square", 1 / 128)


@pytest.fixture
def square32():
    return cached_domain("square", 1 / 32)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
