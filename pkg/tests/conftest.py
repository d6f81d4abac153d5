"""Shared fixtures: quasinormal-mode solves are cached for the whole session."""

import time

import pytest

from kdsmodes.geometry import SpacetimeParams
from kdsmodes.modes import SpectralGrid, assemble_reduced_operator, qnm_solve

M, LAMBDA = 1.0, 0.02
ROTATING_SPINS = (0.0, 0.05, 0.1)
ROTATING_K = (0, 1)
GRID = (48, 12)

ACCEPTANCE_LINES = pytest.StashKey[list]()


class SolveCache:
    """Solve each (a, k, frame, grid, refine) combination once and keep its wall time."""

    def __init__(self):
        self._store = {}
        self.wall_times = {}

    def __call__(self, a, k, frame="star", grid=GRID, refine=True):
        key = (a, k, frame, grid, refine)
        if key not in self._store:
            start = time.perf_counter()
            params = SpacetimeParams(a, M, LAMBDA)
            problem = assemble_reduced_operator(params, None, k, SpectralGrid(*grid), frame=frame)
            self._store[key] = qnm_solve(problem, refine=refine)
            self.wall_times[key] = time.perf_counter() - start
        return self._store[key]


@pytest.fixture(scope="session")
def solve():
    return SolveCache()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def record(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        print(line)
        lines.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
