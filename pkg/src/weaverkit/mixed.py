"""Mixed characteristic polynomials and expected characteristic polynomials.

Two independent evaluators are provided:

* polarization: the coefficient of ``z**(d-k)`` in ``mu`` is
  ``(-1)**k * sum_{|S|=k} sum_{|R|=k} MD(A_i[R] : i in S)``, where ``MD``
  extracts the multilinear coefficient of a ``k x k`` pencil by finite
  differences over subsets. Grouping the finite-difference terms by the
  subset ``T`` they evaluate gives the equivalent form
  ``sum_{|T|<=k} (-1)**(k-|T|) * C(m-|T|, k-|T|) * e_k(A_T)`` with
  ``A_T = sum_{i in T} A_i`` and ``e_k`` the sum of ``k x k`` principal
  minors, each computed by an LU determinant.
* enumeration: the probability-weighted average of ``det(zI - sum v_i v_i^*)``
  over every joint outcome of a finite random model, each characteristic
  polynomial from Faddeev-LeVerrier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, prod
from typing import Mapping, Sequence

import numpy as np

from . import config
from .errors import BudgetExceeded, InvalidInput
from .linalg import as_hermitian, as_vectors, faddeev_leverrier, jacobi_eigh
from .poly import RealPolynomial


@dataclass(frozen=True)
class MatrixTuple:
    """``m`` PSD ``d x d`` matrices stacked as an ``(m, d, d)`` array."""

    mats: np.ndarray

    @property
    def dim(self) -> int:
        return self.mats.shape[1]

    @property
    def count(self) -> int:
        return self.mats.shape[0]

    def total(self) -> np.ndarray:
        return self.mats.sum(axis=0)

    def traces(self) -> np.ndarray:
        return np.trace(self.mats, axis1=1, axis2=2).real


def matrix_tuple(mats, psd_tol: float = config.PSD_TOL) -> MatrixTuple:
    mats = [as_hermitian(A, name=f"A_{i + 1}") for i, A in enumerate(mats)]
    if not mats:
        raise InvalidInput("matrix tuple must be non-empty")
    d = mats[0].shape[0]
    if any(A.shape != (d, d) for A in mats):
        raise InvalidInput("matrices in a tuple must share one dimension")
    for i, A in enumerate(mats):
        w, _ = jacobi_eigh(A)
        if w[-1] < -psd_tol:
            raise InvalidInput(f"A_{i + 1} is not PSD (eigenvalue {w[-1]:.3e})")
    return MatrixTuple(np.stack(mats))


def polarization_work(m: int, d: int) -> int:
    """Determinant count of the naive polarization sum."""
    return sum(comb(m, k) * comb(d, k) * 2**k for k in range(min(m, d) + 1))


def _subset_sums(mats: np.ndarray) -> np.ndarray:
    m = mats.shape[0]
    out = np.zeros((1 << m,) + mats.shape[1:], dtype=mats.dtype)
    for mask in range(1, 1 << m):
        low = mask & -mask
        out[mask] = out[mask ^ low] + mats[low.bit_length() - 1]
    return out


def mixed_char_poly(T: MatrixTuple | Sequence, budget: int = config.POLARIZATION_BUDGET) -> RealPolynomial:
    """``prod_i (1 - d/dz_i) det(zI + sum z_i A_i)`` at ``z_i = 0``."""
    if not isinstance(T, MatrixTuple):
        T = matrix_tuple(T)
    m, d = T.count, T.dim
    work = polarization_work(m, d)
    if work > budget:
        raise BudgetExceeded(f"polarization needs {work} determinants, budget {budget}",
                             required=work, cap=budget)
    sums = _subset_sums(T.mats)
    sizes = np.array([bin(s).count("1") for s in range(1 << m)])
    coeffs = np.zeros(d + 1)
    coeffs[d] = 1.0
    for k in range(1, min(m, d) + 1):
        rows = [list(R) for R in itertools.combinations(range(d), k)]
        idx = np.array(rows)
        masks = np.nonzero(sizes <= k)[0]
        sub = sums[masks][:, idx[:, :, None], idx[:, None, :]]
        ek = np.linalg.det(sub).real.sum(axis=1)
        j = sizes[masks]
        weights = np.array([(-1) ** (k - t) * comb(m - t, k - t) for t in j], dtype=float)
        coeffs[d - k] = (-1) ** k * float(np.dot(weights, ek))
    return RealPolynomial(coeffs, monic=True)


@dataclass(frozen=True)
class RandomRankOneModel:
    """Independent random vectors; index ``i`` takes ``values[i][j]`` with ``probs[i][j]``."""

    dim: int
    values: tuple[np.ndarray, ...]  # each (r_i, dim)
    probs: tuple[np.ndarray, ...]  # each (r_i,)

    def __post_init__(self):
        if self.dim < 1 or not self.values or len(self.values) != len(self.probs):
            raise InvalidInput("model needs a positive dimension and at least one index")
        for i, (v, p) in enumerate(zip(self.values, self.probs)):
            if v.ndim != 2 or v.shape[1] != self.dim or v.shape[0] != p.shape[0] or v.shape[0] == 0:
                raise InvalidInput(f"index {i}: values must be (r_i, {self.dim}) with one prob each")
            if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-12:
                raise InvalidInput(f"index {i}: probabilities must be non-negative and sum to 1")
            if not (np.all(np.isfinite(v)) and np.all(np.isfinite(p))):
                raise InvalidInput(f"index {i}: non-finite entries")

    @classmethod
    def build(cls, values: Sequence, probs: Sequence | None = None) -> RandomRankOneModel:
        vals = tuple(as_vectors(v) for v in values)
        if probs is None:
            probs = [np.full(v.shape[0], 1.0 / v.shape[0]) for v in vals]
        ps = tuple(np.asarray(p, dtype=float).reshape(-1) for p in probs)
        return cls(vals[0].shape[1], vals, ps)

    @property
    def count(self) -> int:
        return len(self.values)

    def outcomes(self) -> int:
        return prod(v.shape[0] for v in self.values)

    def expectations(self) -> np.ndarray:
        """``E[v_i v_i^*]`` for every index, shape ``(m, d, d)``."""
        out = []
        for v, p in zip(self.values, self.probs):
            E = np.einsum("j,ja,jb->ab", p, v, v.conj())
            out.append(0.5 * (E + E.conj().T))
        return np.stack(out)

    def condition(self, fixed: Mapping[int, int]) -> RandomRankOneModel:
        """The model with index ``i`` fixed to its value number ``fixed[i]``."""
        values = list(self.values)
        probs = list(self.probs)
        for i, j in fixed.items():
            if not 0 <= i < self.count:
                raise InvalidInput(f"fixed index {i} out of range")
            if not 0 <= j < values[i].shape[0]:
                raise InvalidInput(f"index {i} has no value number {j}")
            values[i] = values[i][j: j + 1]
            probs[i] = np.ones(1)
        return RandomRankOneModel(self.dim, tuple(values), tuple(probs))


def _enumerate(model: RandomRankOneModel, cap: int) -> RealPolynomial:
    n = model.outcomes()
    if n > cap:
        raise BudgetExceeded(f"enumeration needs {n} outcomes, cap {cap}", required=n, cap=cap)
    d = model.dim
    outer = [np.einsum("ja,jb->jab", v, v.conj()) for v in model.values]
    # split indices so the inner table stays small; the outer loop is Python
    tail_sums = np.zeros((1, d, d), dtype=complex)
    tail_probs = np.ones(1)
    split = model.count
    while split > 0 and tail_sums.shape[0] * outer[split - 1].shape[0] <= 4096:
        split -= 1
        tail_sums = (outer[split][:, None] + tail_sums[None]).reshape(-1, d, d)
        tail_probs = np.outer(model.probs[split], tail_probs).reshape(-1)
    acc = np.zeros(d + 1)
    heads = [range(v.shape[0]) for v in model.values[:split]]
    for choice in itertools.product(*heads):
        base = np.zeros((d, d), dtype=complex)
        w = 1.0
        for i, j in enumerate(choice):
            base = base + outer[i][j]
            w *= model.probs[i][j]
        if w == 0.0:
            continue
        polys = faddeev_leverrier(base[None] + tail_sums)
        acc += w * (tail_probs @ polys)
    acc[d] = 1.0
    return RealPolynomial(acc, monic=True)


def expected_char_poly(model: RandomRankOneModel, method: str = "polarization",
                       cap: int = config.ENUMERATION_CAP,
                       budget: int = config.POLARIZATION_BUDGET) -> RealPolynomial:
    """``E det(zI - sum_i v_i v_i^*)``.

    ``method="polarization"`` evaluates the mixed characteristic polynomial of
    the marginal expectations; ``"enumeration"`` averages over every outcome.
    """
    if method == "polarization":
        return mixed_char_poly(MatrixTuple(model.expectations()), budget=budget)
    if method == "enumeration":
        return _enumerate(model, cap)
    raise InvalidInput(f"unknown method {method!r}")


def conditional_expected_char_poly(model: RandomRankOneModel, fixed: Mapping[int, int],
                                   method: str = "polarization", **kw) -> RealPolynomial:
    return expected_char_poly(model.condition(fixed), method=method, **kw)


def model_to_dict(model: RandomRankOneModel) -> dict:
    from .jsonio import vector_to_json
    return {"dim": model.dim,
            "indices": [{"values": [{"vector": vector_to_json(v), "prob": float(p)}
                                    for v, p in zip(vals, ps)]}
                        for vals, ps in zip(model.values, model.probs)]}


def model_from_dict(data: dict) -> RandomRankOneModel:
    from .jsonio import vector_from_json
    try:
        d = int(data["dim"])
        values, probs = [], []
        for entry in data["indices"]:
            vs = [vector_from_json(x["vector"]) for x in entry["values"]]
            values.append(np.array(vs, dtype=complex).reshape(len(vs), d))
            probs.append(np.array([float(x["prob"]) for x in entry["values"]]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad model JSON: {exc}") from exc
    return RandomRankOneModel(d, tuple(values), tuple(probs))
