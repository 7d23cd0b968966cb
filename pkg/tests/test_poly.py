from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weaverkit.errors import InvalidInput, NotRealRooted
from weaverkit.linalg import char_poly, jacobi_eigh
from weaverkit.poly import (RealPolynomial, convex_combination, differentiate, is_real_rooted, maxroot,
                            maxroot_with_error, sturm_real_root_count)

HALF = RealPolynomial([0.5, -2.0, 1.0])  # z^2 - 2z + 1/2


def from_roots(roots) -> RealPolynomial:
    return RealPolynomial(np.poly(roots)[::-1].real)


def test_differentiate_examples():
    assert np.allclose(differentiate(HALF).coeffs, [-2.0, 2.0])
    assert differentiate(RealPolynomial([5.0])).is_zero
    assert np.allclose(differentiate(RealPolynomial([0, 0, 0, 1])).coeffs, [0, 0, 3])


def test_trimming_is_relative():
    assert RealPolynomial([100.0, 1.0, 1e-30]).degree == 1
    assert RealPolynomial([1e20, 1.0]).degree == 0
    q = RealPolynomial([1e-30, 1e-31])
    assert q.degree == 1


def test_monic_flag():
    assert RealPolynomial([2.0, 1.0], monic=True).lead == 1.0
    with pytest.raises(InvalidInput):
        RealPolynomial([2.0, 1.5], monic=True)


def test_sturm_examples():
    assert sturm_real_root_count(RealPolynomial([-1, 0, 1]), -2, 2) == 2
    assert sturm_real_root_count(RealPolynomial([1, 0, 1]), -10, 10) == 0
    assert sturm_real_root_count(HALF, 0, 2) == 2
    # an endpoint on a root is nudged outward
    assert sturm_real_root_count(RealPolynomial([-1, 0, 1]), -1, 1) == 2


def test_is_real_rooted_examples():
    cube = RealPolynomial([-1, 3, -3, 1])  # (z - 1)^3
    v = is_real_rooted(cube)
    assert v.status == "real-rooted" and v.real_root_count == 1
    assert is_real_rooted(RealPolynomial([1, 0, 1])).status == "not-real-rooted"
    assert is_real_rooted(HALF).real_rooted
    assert is_real_rooted(RealPolynomial([0, 0, 0, 1])).real_rooted


def test_maxroot_examples():
    assert maxroot(HALF) == pytest.approx(1 + 1 / math.sqrt(2), abs=1e-12)
    assert maxroot(RealPolynomial([0, 0, 0, 0, 1])) == 0.0
    assert maxroot(RealPolynomial([0, -1, 1])) == pytest.approx(1.0, abs=1e-14)


def test_maxroot_rejects_bad_input():
    with pytest.raises(InvalidInput):
        maxroot(RealPolynomial([3.0]))
    with pytest.raises(InvalidInput):
        maxroot(RealPolynomial([1.0, -1.0]))
    with pytest.raises(NotRealRooted):
        maxroot(RealPolynomial([1.0, 0.0, 1.0]))


@pytest.mark.parametrize("roots", [
    [1.5, 1.5, 1.0, 0.0],
    [2.0, 2.0, 2.0, 1.0],
    [3.0] * 5 + [1.0],
    [1.5] * 7 + [0.0] * 3,
    [4.0, 4.0, 4.0, 4.0, 3.9, 1.0],
    [-1.0, -2.0],
])
def test_maxroot_multiple_roots(roots):
    root, err = maxroot_with_error(from_roots(roots))
    assert root == pytest.approx(max(roots), abs=1e-11 * (1 + max(roots)))
    assert err >= 0.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=10))
def test_maxroot_random_roots(roots):
    root, err = maxroot_with_error(from_roots(roots))
    top = max(roots)
    assert abs(root - top) <= max(err, 1e-11 * (1 + abs(top))) + 1e-12


def test_maxroot_matches_eigenvalue():
    rng = np.random.default_rng(3)
    for d in range(1, 9):
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        A = (A + A.conj().T) / 4
        assert maxroot(char_poly(A)) == pytest.approx(jacobi_eigh(A)[0][0], abs=1e-8)


def test_convex_combination_examples():
    p = convex_combination([RealPolynomial([-1, 1]), RealPolynomial([-3, 1])], [0.5, 0.5])
    assert np.allclose(p.coeffs, [-2, 1])
    q = convex_combination([HALF, RealPolynomial([1, 1, 1])], [1.0, 0.0])
    assert np.allclose(q.coeffs, HALF.coeffs)
    r = convex_combination([RealPolynomial([-1, 0, 1]), RealPolynomial([3, -4, 1])], [0.5, 0.5])
    assert np.allclose(r.coeffs, [1, -2, 1])


def test_convex_combination_errors():
    with pytest.raises(InvalidInput):
        convex_combination([RealPolynomial([-1, 1]), HALF], [0.5, 0.5])
    with pytest.raises(InvalidInput):
        convex_combination([HALF, HALF], [0.7, 0.7])


def test_interlacing_sandwich():
    # polynomials with a common interlacer: maxroot of any mixture lies between the two
    p = from_roots([0.0, 1.0, 3.0])
    q = from_roots([0.5, 2.0, 2.5])
    lo, hi = sorted([maxroot(p), maxroot(q)])
    for t in np.arange(0.1, 1.0, 0.1):
        mix = convex_combination([p, q], [1 - t, t])
        assert lo - 1e-8 <= maxroot(mix) <= hi + 1e-8


def test_json_round_trip():
    assert RealPolynomial.from_dict(HALF.to_dict()).allclose(HALF, rel=0.0)
    with pytest.raises(InvalidInput):
        RealPolynomial.from_dict({"coef": [1]})
