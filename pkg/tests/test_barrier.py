from __future__ import annotations

import math

import numpy as np
import pytest

from weaverkit.barrier import (barrier_on_diagonal, barrier_shift_check, barrier_value, mcp_certificate,
                               shifted_barrier)
from weaverkit.corpus import psd_tuple_summing_to_identity
from weaverkit.errors import InvalidInput, SingularPoint

HALVES = [np.eye(2) / 2, np.eye(2) / 2]


def test_diagonal_examples(rng):
    assert barrier_on_diagonal(HALVES, 0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert barrier_on_diagonal([np.eye(3)], 0, 1.0) == pytest.approx(3.0, abs=1e-12)
    T = psd_tuple_summing_to_identity(rng, 3, 4)
    for j in range(4):
        assert barrier_on_diagonal(T, j, 2.0) == pytest.approx(np.trace(T[j]).real / 2, abs=1e-9)


def test_barrier_off_diagonal_example():
    assert barrier_value(HALVES, [1.0, 1.0], 0) == pytest.approx(1.0, abs=1e-12)
    assert barrier_value(HALVES, [2.0, 1.0], 0) == pytest.approx(2 / 3, abs=1e-12)


def test_convexity_example():
    vals = [barrier_value(HALVES, [t, 1.0], 0) for t in (1.0, 1.5, 2.0)]
    assert vals[0] - 2 * vals[1] + vals[2] >= -1e-9
    assert vals[0] > vals[1] > vals[2] > 0


def test_singular_point():
    with pytest.raises(SingularPoint):
        barrier_value(HALVES, [0.0, 0.0], 0)
    with pytest.raises(InvalidInput):
        barrier_on_diagonal(HALVES, 0, 0.0)


def test_certificate_examples():
    c = mcp_certificate(HALVES)
    assert c.ok and c.epsilon == pytest.approx(1.0)
    assert c.achieved_maxroot == pytest.approx(1 + 1 / math.sqrt(2), abs=1e-12)
    assert c.claimed_bound == pytest.approx(4.0)
    assert c.t_star == pytest.approx(2.0) and c.delta_star == pytest.approx(2.0)
    for m in (2, 3, 5):
        c = mcp_certificate([np.eye(1) / m] * m)
        assert c.ok and c.claimed_bound == pytest.approx((1 + 1 / math.sqrt(m)) ** 2)
    d = 3
    c = mcp_certificate([np.diag(np.eye(d)[i]) for i in range(d)])
    assert c.achieved_maxroot == pytest.approx(1.0, abs=1e-6)
    assert set(c.to_dict()) >= {"epsilon", "t_star", "delta_star", "claimed_bound", "achieved_maxroot", "ok"}


def test_certificate_rejects_non_identity_sum():
    with pytest.raises(InvalidInput):
        mcp_certificate([np.eye(2) / 3, np.eye(2) / 3])


def test_shift_check_report(rng):
    rep = barrier_shift_check(psd_tuple_summing_to_identity(rng, 3, 3), samples=4)
    assert rep.ok and rep.samples > 0
    assert rep.shift_checks > 0 and rep.max_shift_formula_error < 1e-5
    assert isinstance(rep.to_dict()["max_shift_formula_error"], float)


def test_shifted_barrier_formula(rng):
    T = psd_tuple_summing_to_identity(rng, 2, 3)
    x = np.full(3, 3.0)
    # central difference of log((1 - d_j) p) along e_i
    h = 1e-5
    j, i = 1, 0

    def g(y):
        M = np.tensordot(y, T, axes=1)
        return math.log(np.linalg.det(M).real * (1 - np.trace(np.linalg.solve(M, T[j])).real))

    e = np.eye(3)[i] * h
    fd = (g(x + e) - g(x - e)) / (2 * h)
    assert shifted_barrier(T, x, i, j) == pytest.approx(fd, rel=1e-6)
