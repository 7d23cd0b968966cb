from __future__ import annotations

import math

import numpy as np
import pytest


@pytest.fixture
def mercedes() -> np.ndarray:
    """Three vectors at 120 degrees in C^2 with squared norm 2/3."""
    s = math.sqrt(2.0 / 3.0)
    return np.array([[s * math.cos(2 * math.pi * k / 3), s * math.sin(2 * math.pi * k / 3)]
                     for k in range(3)], dtype=complex)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


# acceptance criteria report one line each; the lines are gathered here and
# printed after the run so that they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
