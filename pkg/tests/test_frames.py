from __future__ import annotations

import math

import numpy as np
import pytest

from weaverkit.corpus import (parseval_frame, random_unitary, riesz_system, two_bases, unit_bessel_system,
                              unit_frame)
from weaverkit.errors import BudgetExceeded, IllConditioned, InvalidInput
from weaverkit.frames import (bessel_riesz_complement_check, bt_partition, complement_report,
                              completion_parameters, dual_riesz_system, feichtinger_partition,
                              feichtinger_required_r, fourier_frame_gram, frame_bounds, gram_to_vectors,
                              is_parseval, naimark_complement, parseval_completion, r_epsilon_partition,
                              riesz_bounds, schur_horn_frame, schur_horn_matrix, ves_split)
from weaverkit.linalg import frame_operator, gram_matrix, span_coordinates


def test_frame_bounds_examples(mercedes):
    b = frame_bounds(np.eye(3))
    assert (b.lower, b.upper, b.riesz_lower, b.riesz_upper) == pytest.approx((1, 1, 1, 1))
    b = frame_bounds(mercedes)
    assert (b.lower, b.upper) == pytest.approx((1.0, 1.0))
    assert b.riesz_lower == pytest.approx(0.0, abs=1e-12)
    assert frame_bounds([[1.0, 0.0], [1.0, 0.0]]).upper == pytest.approx(2.0)
    assert is_parseval(mercedes) and not is_parseval([[1.0, 0.0], [1.0, 0.0]])


def test_naimark_examples(mercedes):
    assert np.allclose(naimark_complement(np.eye(3)), 0.0)
    assert np.allclose(naimark_complement([[1.0]]), 0.0)
    W = naimark_complement(mercedes)
    assert np.sum(np.abs(W) ** 2, axis=1) == pytest.approx([1 / 3] * 3)
    assert np.linalg.matrix_rank(W, tol=1e-10) == 1
    with pytest.raises(InvalidInput):
        naimark_complement([[1.0, 0.0], [1.0, 0.0]])


def test_complement_examples(mercedes, rng):
    rep = complement_report(mercedes, [0, 1], 0.0)
    assert rep.bessel == pytest.approx(1.0) and rep.complement_lower == pytest.approx(0.0, abs=1e-12)
    assert rep.identity_error <= 1e-15 and rep.ok
    assert bessel_riesz_complement_check(mercedes, [], 0.3)
    V = parseval_frame(rng, 3, 6)
    eps = float(np.sum(np.abs(V[2]) ** 2))
    rep = complement_report(V, [2], 0.5)
    assert rep.complement_lower == pytest.approx(1 - eps, abs=1e-12)
    with pytest.raises(InvalidInput):
        complement_report(V, [7], 0.5)


def test_complement_norms_and_gram(rng):
    V = parseval_frame(rng, 3, 7)
    W = naimark_complement(V)
    assert np.sum(np.abs(W) ** 2, axis=1) == pytest.approx(1 - np.sum(np.abs(V) ** 2, axis=1), abs=1e-10)
    G = gram_matrix(V)
    assert np.max(np.abs(G @ G - G)) <= 1e-9
    assert is_parseval(span_coordinates(W))


def test_schur_horn_examples():
    lam = np.array([0.7, 0.2, 0.1])
    V = schur_horn_frame(lam, lam)
    assert np.allclose(np.abs(V), np.diag(np.sqrt(lam)), atol=1e-12)
    V = schur_horn_frame([1, 1, 0], [2 / 3] * 3)
    assert np.sum(np.abs(V) ** 2, axis=1) == pytest.approx([2 / 3] * 3, abs=1e-12)
    assert np.allclose(frame_operator(V), np.diag([1, 1, 0]), atol=1e-12)
    V = schur_horn_frame([1, 0], [1, 0])
    assert np.allclose(np.abs(V), [[1, 0], [0, 0]])
    with pytest.raises(InvalidInput):
        schur_horn_frame([1, 0], [0.2, 0.2])
    with pytest.raises(InvalidInput):
        schur_horn_matrix([0.5, 0.5], [1.0, 0.0])


def test_schur_horn_random(rng):
    for _ in range(20):
        M = int(rng.integers(2, 9))
        lam = np.sort(rng.random(M))[::-1] * 2
        # a point in the permutohedron of lam is majorized by it
        weights = rng.dirichlet(np.ones(M), size=M)
        dsq = np.sort(weights @ lam)[::-1]
        dsq *= lam.sum() / dsq.sum()
        V = schur_horn_frame(lam, dsq)
        assert np.sort(np.linalg.eigvalsh(frame_operator(V)))[::-1] == pytest.approx(lam, abs=1e-7)
        assert np.sum(np.abs(V) ** 2, axis=1) == pytest.approx(dsq, abs=1e-8)


def test_completion_examples(rng):
    assert completion_parameters(np.eye(2), 0.0) == (0, 0.0)
    n, C = completion_parameters(np.eye(2), 0.6)
    assert n == 3 and C == pytest.approx(0.6)
    full = parseval_completion(np.eye(2), 0.6)
    assert full.shape == (7, 5) and is_parseval(full)
    assert np.sum(np.abs(full[2:]) ** 2, axis=1) == pytest.approx([0.6] * 5)
    one = parseval_completion([[1.0]], 0.5)
    assert is_parseval(one)
    V = unit_bessel_system(rng, 3, 5) * 0.9
    eps = float(np.min(np.sum(np.abs(V) ** 2, axis=1)))
    full = parseval_completion(V, eps)
    assert is_parseval(full)
    assert np.min(np.sum(np.abs(full) ** 2, axis=1)) >= eps - 1e-9
    with pytest.raises(InvalidInput):
        parseval_completion([[1.0, 0.0], [1.0, 0.0]], 0.1)


def test_ves_split_simplex():
    # the 13-point simplex frame in C^12 has squared norms 12/13 > 0.92
    n = 13
    P = np.eye(n) - np.full((n, n), 1.0 / n)
    V = gram_to_vectors(P)
    part = ves_split(V)
    lows = [riesz_bounds(V, b)[0] for b in part.nonempty_blocks()]
    delta = 1.0 / n
    assert min(lows) >= 1 - (0.5 + math.sqrt(2 * delta) + delta) - 1e-9


def test_feichtinger_examples(rng):
    assert feichtinger_required_r(1.0) == 552
    for d in range(2, 7):
        V = two_bases(rng, d)
        c = feichtinger_partition(V, 0.5)
        assert c.ok and len(c.per_block_riesz) == 2
        for lo, hi in c.per_block_riesz:
            assert lo == pytest.approx(0.5) and hi == pytest.approx(0.5)
            assert lo >= 0.5 / 50 - 1e-9 and hi <= 0.5 / 0.92 + 1e-9
        assert c.required_r == 2 * feichtinger_required_r(0.5)
    c = feichtinger_partition(random_unitary(rng, 3), 1.0)
    assert len(c.per_block_riesz) == 1 and c.per_block_riesz[0] == pytest.approx((1.0, 1.0))


def test_feichtinger_random_bessel(rng):
    done = 0
    for _ in range(6):
        V = unit_bessel_system(rng, 3, 5)
        try:
            c = feichtinger_partition(V)
        except BudgetExceeded:
            continue
        done += 1
        for lo, hi in c.per_block_riesz:
            assert lo >= c.epsilon / 50 - 1e-9 and hi <= c.epsilon / 0.92 + 1e-9
    assert done > 0


def test_dual_examples(rng):
    Q = random_unitary(rng, 3)
    assert np.allclose(dual_riesz_system(Q), Q)
    V = np.array([[1.0, 0.0], [1 / math.sqrt(2), 1 / math.sqrt(2)]])
    D = dual_riesz_system(V)
    assert np.allclose(V.conj() @ D.T, np.eye(2), atol=1e-12)
    with pytest.raises(IllConditioned):
        dual_riesz_system([[1.0, 0.0], [1.0, 1e-7]])
    with pytest.raises(InvalidInput):
        dual_riesz_system(V, [])


def test_dual_bounds_are_reciprocal(rng):
    for _ in range(10):
        V = riesz_system(rng, 3, 5)
        D = dual_riesz_system(V)
        lo, hi = riesz_bounds(V)
        dlo, dhi = riesz_bounds(D)
        assert dlo == pytest.approx(1 / hi, rel=1e-7) and dhi == pytest.approx(1 / lo, rel=1e-7)
        assert np.max(np.abs(V.conj() @ D.T - np.eye(3))) <= 1e-8


def test_r_epsilon_examples(rng):
    c = r_epsilon_partition(random_unitary(rng, 3), 0.3)
    assert len(c.per_block_riesz) == 1 and c.per_block_riesz[0] == pytest.approx((1.0, 1.0))
    d = 3
    V = two_bases(rng, d) * math.sqrt(2)
    V = V[np.argsort(np.arange(2 * d) % d, kind="stable")]  # interleave the two bases
    c = r_epsilon_partition(V, 0.5)
    assert c.ok and len(c.per_block_riesz) == 2
    assert all(lo == pytest.approx(1.0) and hi == pytest.approx(1.0) for lo, hi in c.per_block_riesz)
    with pytest.raises(BudgetExceeded):
        r_epsilon_partition(unit_frame(rng, 4, 8), 0.01)
    with pytest.raises(InvalidInput):
        r_epsilon_partition([[2.0, 0.0]], 0.5)


def test_bt_examples(rng):
    c = bt_partition(random_unitary(rng, 3), 0.2)
    assert len(c.per_block_riesz) == 1 and c.per_block_riesz[0] == pytest.approx((1.0, 1.0))
    A, B = random_unitary(rng, 2), random_unitary(rng, 2)
    T = np.zeros((4, 4), dtype=complex)
    T[:2, [0, 2]] = A
    T[2:, [1, 3]] = B
    c = bt_partition(T, 0.2)
    assert all(lo >= 0.8 - 1e-9 and hi <= 1.2 + 1e-9 for lo, hi in c.per_block_riesz)
    T = np.eye(3)[:, [0, 1, 2, 0]]
    c = bt_partition(T, 0.5)
    a = c.partition.assignment
    assert a[0] != a[3] and c.ok
    with pytest.raises(InvalidInput):
        bt_partition(2 * np.eye(2), 0.5)


def test_fourier_examples():
    assert np.allclose(fourier_frame_gram([(0.0, 1.0)], 4), np.eye(9), atol=1e-15)
    G = fourier_frame_gram([(0.0, 0.5)], 8)
    assert np.all(np.diag(G) == 0.5)
    assert abs(G[9, 8] - 1j / math.pi) <= 1e-12
    off = np.abs(np.diag(G, 1))
    assert np.max(np.abs(off - 1 / math.pi)) <= 1e-12
    G2 = fourier_frame_gram([(0.0, 0.25), (0.5, 0.75)], 3)
    assert np.allclose(G2, G2.conj().T) and np.all(np.diag(G2) == 0.5)
    with pytest.raises(InvalidInput):
        fourier_frame_gram([(0.0, 0.5), (0.4, 0.8)], 3)
    with pytest.raises(InvalidInput):
        fourier_frame_gram([(0.5, 0.2)], 3)


def test_gram_round_trip(rng):
    V = parseval_frame(rng, 3, 5)
    G = gram_matrix(V)
    assert np.allclose(gram_matrix(gram_to_vectors(G)), G, atol=1e-12)
