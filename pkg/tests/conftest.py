import math

import numpy as np
import pytest

from phlab.core import ONE
from phlab.riccati import make_first_kind

ALPHA0 = 0.5 * (-1 + 3 * math.sqrt(3) * 1j)

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def first_kind():
    """P(1) solution with alpha = (-1 + 3 sqrt(3) i)/2 and the default seed."""
    return make_first_kind(ONE, ALPHA0)


@pytest.fixture(scope="session")
def first_kind_db(first_kind):
    from phlab.survey import scan
    return scan(first_kind, 1.0, 15.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
