from __future__ import annotations

import math

import numpy as np
import pytest

from weaverkit.corpus import psd_tuple_summing_to_identity, rank_one_model, rank_one_tuple
from weaverkit.errors import BudgetExceeded, InvalidInput
from weaverkit.linalg import char_poly
from weaverkit.mixed import (RandomRankOneModel, conditional_expected_char_poly, expected_char_poly,
                             matrix_tuple, mixed_char_poly, model_from_dict, model_to_dict,
                             polarization_work)
from weaverkit.poly import coefficient_error, is_real_rooted, maxroot

S2 = math.sqrt(2.0)


def close(p, coeffs, tol=1e-12):
    assert p.coeffs.size == len(coeffs)
    assert np.allclose(p.coeffs, coeffs, atol=tol, rtol=0)


def test_mu_hand_examples():
    close(mixed_char_poly([np.diag([1.0, 0.0])]), [0.0, -1.0, 1.0])
    close(mixed_char_poly([np.eye(2)]), [0.0, -2.0, 1.0])
    close(mixed_char_poly([np.eye(2) / 2, np.eye(2) / 2]), [0.5, -2.0, 1.0])
    assert maxroot(mixed_char_poly([np.eye(2) / 2] * 2)) == pytest.approx(1 + 1 / S2, abs=1e-12)


# exact values from a symbolic expansion of prod(1 - d/dz_i) det(zI + sum z_i A_i)
def test_mu_matches_symbolic_expansion():
    A1 = np.array([[1 / 2, 1 / 4], [1 / 4, 1 / 4]])
    A2 = np.array([[1 / 3, 1j / 6], [-1j / 6, 1 / 2]])
    A3 = np.diag([1 / 5, 0.0])
    close(mixed_char_poly([A1, A2, A3]), [29 / 60, -107 / 60, 1.0], 1e-14)
    B1 = np.diag([1.0, 0.0, 1.0]) / 2
    B2 = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]]) / 3
    B3 = np.array([[0, 0, 0], [0, 1, 1j], [0, -1j, 1]]) / 2
    close(mixed_char_poly([B1, B2, B3]), [-1 / 6, 7 / 4, -8 / 3, 1.0], 1e-14)


def test_rank_one_collapse(rng):
    for _ in range(20):
        d, m = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        T = rank_one_tuple(rng, d, m)
        assert coefficient_error(mixed_char_poly(T), char_poly(T.sum(axis=0))) <= 1e-8


def test_degree_and_monic(rng):
    T = psd_tuple_summing_to_identity(rng, 4, 5)
    mu = mixed_char_poly(T)
    assert mu.degree == 4 and abs(mu.lead - 1.0) <= 1e-10
    assert is_real_rooted(mu).status == "real-rooted"


def test_multi_affine_and_symmetric(rng):
    T = psd_tuple_summing_to_identity(rng, 3, 4)
    B, C = T[0], psd_tuple_summing_to_identity(rng, 3, 2)[0]
    rest = list(T[1:])
    for a in (0.3, 0.7):
        lhs = mixed_char_poly([a * B + (1 - a) * C] + rest)
        rhs = a * mixed_char_poly([B] + rest).coeffs + (1 - a) * mixed_char_poly([C] + rest).coeffs
        assert np.max(np.abs(lhs.coeffs - rhs)) <= 1e-8 * np.max(np.abs(rhs))
    perm = rng.permutation(len(T))
    assert coefficient_error(mixed_char_poly(T), mixed_char_poly(T[perm])) <= 1e-12


def test_tuple_validation():
    with pytest.raises(InvalidInput):
        matrix_tuple([np.diag([1.0, -0.1])])
    with pytest.raises(InvalidInput):
        matrix_tuple([np.eye(2), np.eye(3)])
    with pytest.raises(InvalidInput):
        matrix_tuple([])


def test_budget():
    assert polarization_work(2, 2) == 1 + 2 * 2 * 2 + 1 * 1 * 4
    with pytest.raises(BudgetExceeded) as info:
        mixed_char_poly([np.eye(3) / 3] * 3, budget=10)
    assert info.value.required == polarization_work(3, 3)


def test_expected_char_poly_examples():
    det = RandomRankOneModel.build([[[1, 0]], [[0, 1]]])
    for method in ("polarization", "enumeration"):
        close(expected_char_poly(det, method), [1.0, -2.0, 1.0])
    coin = RandomRankOneModel.build([[[1, 0], [0, 1]]])
    for method in ("polarization", "enumeration"):
        close(expected_char_poly(coin, method), [0.0, -1.0, 1.0])
    lift = RandomRankOneModel.build([[[S2, 0], [0, S2]]])
    for method in ("polarization", "enumeration"):
        close(expected_char_poly(lift, method), [0.0, -2.0, 1.0])


def test_conditional_examples():
    model = RandomRankOneModel.build([[[S2, 0], [0, S2]]] * 2)
    close(conditional_expected_char_poly(model, {0: 0}), [2.0, -4.0, 1.0])
    close(conditional_expected_char_poly(model, {0: 0}, method="enumeration"), [2.0, -4.0, 1.0])
    # everything fixed: char poly of the realized sum diag(2, 2)
    close(conditional_expected_char_poly(model, {0: 0, 1: 1}), [4.0, -4.0, 1.0])
    assert coefficient_error(conditional_expected_char_poly(model, {}), expected_char_poly(model)) == 0.0
    with pytest.raises(InvalidInput):
        conditional_expected_char_poly(model, {2: 0})


def test_evaluators_agree(rng):
    for _ in range(15):
        model = rank_one_model(rng, int(rng.integers(1, 5)), int(rng.integers(1, 7)))
        a = expected_char_poly(model, "polarization")
        b = expected_char_poly(model, "enumeration")
        assert coefficient_error(a, b) <= 1e-8


def test_model_validation_and_json(rng):
    with pytest.raises(InvalidInput):
        RandomRankOneModel.build([[[1, 0], [0, 1]]], [[0.7, 0.7]])
    with pytest.raises(InvalidInput):
        RandomRankOneModel.build([[[1, 0]]], [[-1.0]])
    model = rank_one_model(rng, 2, 3)
    back = model_from_dict(model_to_dict(model))
    assert coefficient_error(expected_char_poly(model), expected_char_poly(back)) <= 1e-15
    with pytest.raises(InvalidInput):
        model_from_dict({"dim": 2})
