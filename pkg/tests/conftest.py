import math

import numpy as np
import pytest

from maxrep import numeric
from maxrep.representations import (
    CentralizerElement,
    amalgam_z_rep,
    degenerate_rep,
    hyperbolization_rep,
    irreducible_surface_rep,
    polydisk_rep,
    trivial_rep,
)
from maxrep.surface import default_hyperbolization, default_pair


@pytest.fixture(autouse=True)
def _restore_tolerance():
    old = numeric.get_tolerance()
    yield
    numeric.set_tolerance(old)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def h():
    return default_hyperbolization()


@pytest.fixture(scope="session")
def pair():
    return default_pair()


@pytest.fixture(scope="session")
def reps(h, pair):
    h1, h2 = pair
    return {
        "h": hyperbolization_rep(h),
        "polydisk": polydisk_rep(h, h),
        "irreducible": irreducible_surface_rep(h, 2),
        "rho_z": amalgam_z_rep(h1, h2, CentralizerElement.rotation(math.pi / 4)),
        "degenerate": degenerate_rep(h),
        "trivial": trivial_rep(2),
    }


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion and fail the test when it does not hold."""
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
