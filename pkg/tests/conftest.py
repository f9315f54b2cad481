import math
import sys

import numpy as np
import pytest

from salpeter.core import GridSpec, GridState, UnitSystem


@pytest.fixture
def units():
    return UnitSystem()


@pytest.fixture
def grid():
    # dp = 0.25, so p = 0.75 is the k = 3 grid mode
    return GridSpec(256, 8 * math.pi)


def random_band_limited(grid, rng, k_cut=None, units=None):
    """Random complex spectrum on |k| <= k_cut (default N/8), zero above."""
    units = units or UnitSystem(hbar=grid.hbar)
    k_cut = grid.n_points // 8 if k_cut is None else k_cut
    k = grid.wavenumbers
    mask = np.abs(k) <= k_cut
    phi = np.zeros(grid.n_points, dtype=complex)
    phi[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
    return GridState.from_momentum_samples(grid, phi, units)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    report = getattr(module, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for number in sorted(report):
            terminalreporter.write_line(report[number])
