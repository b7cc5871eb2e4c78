"""Shared fixtures: problem builders and the acceptance summary table."""

from __future__ import annotations

import numpy as np
import pytest

import levyexit as le

# One line per acceptance criterion, printed after the test summary so the
# pass/fail verdicts are visible in the terminal output.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def build_problem(triplet, domain, resolution):
    """Grid + assembled operators for one triplet/domain pairing."""
    grid = le.build_grid(domain, resolution)
    kf = le.kernel_functions(le.tail_functions(triplet))
    table = le.tabulate(kf, grid.steps[0], le.suggest_radius(kf), A=triplet.A)
    ops = le.build_operator_set(grid, table, triplet.A)
    return grid, ops


@pytest.fixture(scope="session")
def brownian_triplet():
    return le.LevyTriplet(A=1.0, gamma=0.0, measure=le.NoJumps())


@pytest.fixture(scope="session")
def cauchy_triplet():
    return le.LevyTriplet(A=0.0, gamma=0.0, measure=le.StableJumps(alpha=1.0))


@pytest.fixture(scope="session")
def unit_domain():
    return le.Domain(((-1.0, 1.0),))


@pytest.fixture(scope="session")
def brownian200(brownian_triplet, unit_domain):
    """Brownian problem at resolution 200 (shared across acceptance tests)."""
    return build_problem(brownian_triplet, unit_domain, 200)


@pytest.fixture(scope="session")
def cauchy200(cauchy_triplet, unit_domain):
    """Cauchy problem at resolution 200 (shared across acceptance tests)."""
    return build_problem(cauchy_triplet, unit_domain, 200)


@pytest.fixture(scope="session")
def brownian200_eigen(brownian200):
    grid, ops = brownian200
    return le.spectral_summary(ops.B, ops.S_mid, grid, 0.0)


@pytest.fixture(scope="session")
def cauchy200_eigen(cauchy200):
    grid, ops = cauchy200
    return le.spectral_summary(ops.B, ops.S_mid, grid, 0.0)


def interior_index(grid, x):
    kind, idx = grid.locate(float(x))
    assert kind == "interior", f"{x} is not an interior node"
    return idx


def max_rel_err(actual, expected):
    actual = np.asarray(actual, float)
    expected = np.asarray(expected, float)
    return float(np.max(np.abs(actual - expected) / np.maximum(np.abs(expected), 1e-300)))
