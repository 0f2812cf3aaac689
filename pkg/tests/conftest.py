import numpy as np
import pytest

from slsdesign import enumerate_binary

_ACCEPTANCE_LINES = []


def record_acceptance(label: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}" + (f"  {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def binary_spaces():
    cache = {}

    def get(q):
        if q not in cache:
            cache[q] = enumerate_binary(q)
        return cache[q]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_measure(space, rng, sparsity=0.0):
    from slsdesign import DesignMeasure

    w = rng.exponential(size=space.n)
    if sparsity:
        w[rng.random(space.n) < sparsity] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
    return DesignMeasure(space, w / w.sum())
