"""Paving reductions: projections, reflections, self-adjoint and bounded operators.

Each step builds the object the next one needs and pastes partitions
together by common refinement, so block counts multiply along the chain:
``r`` blocks for a diagonal-1/2 projection, ``r**2`` for a reflection (and
for a self-adjoint operator via its reflection dilation), and ``r**4`` for
a general operator split into two self-adjoint parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import BudgetExceeded, InvalidInput
from .linalg import as_hermitian, as_square, jacobi_eigh, operator_norm, psd_sqrt, range_basis
from .partition import Partition, brute_force_partition, greedy_partition, refine

__all__ = [
    "PavingCertificate", "compressions", "pave_projection_half", "pave_projection_delta",
    "pave_reflection", "pave_selfadjoint", "pave_bounded", "refine", "reflection_dilation",
    "blocks_for_eps",
]


@dataclass
class PavingCertificate:
    target_eps: float
    achieved: list[float]  # compression norms of the non-empty blocks, in block order
    partition: Partition
    input_norm: float
    block_ledger: list[int] = field(default_factory=list)
    scale: float = 1.0
    two_sided_ok: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def bound(self) -> float:
        return self.target_eps * self.input_norm

    @property
    def ok(self) -> bool:
        return max(self.achieved, default=0.0) <= self.bound + config.CERT_SLACK

    def to_dict(self) -> dict:
        return {"target_eps": self.target_eps, "input_norm": self.input_norm, "bound": self.bound,
                "achieved": list(self.achieved), "r": self.partition.block_count,
                "assignment": list(self.partition.assignment), "block_ledger": list(self.block_ledger),
                "scale": self.scale, "two_sided_ok": self.two_sided_ok, "notes": list(self.notes),
                "ok": self.ok}


def compressions(T, partition: Partition) -> list[float]:
    """``||P_C T P_C||`` for every non-empty block ``C``."""
    T = as_square(T)
    if T.shape[0] != partition.size:
        raise InvalidInput("partition does not match the matrix size")
    return [operator_norm(T[np.ix_(b, b)]) for b in partition.nonempty_blocks()]


def two_sided_check(R, partition: Partition, eps: float) -> bool:
    """``-eps P_C <= P_C R P_C <= eps P_C`` on every block, via eigenvalues."""
    R = as_hermitian(R)
    for b in partition.nonempty_blocks():
        w, _ = jacobi_eigh(R[np.ix_(b, b)])
        if w[0] > eps + config.CERT_SLACK or w[-1] < -eps - config.CERT_SLACK:
            return False
    return True


def blocks_for_eps(eps: float) -> int:
    if not 0.0 < eps:
        raise InvalidInput("eps must be positive")
    return math.ceil(36.0 / eps**2 - 1e-12)


def _projection(Q, name: str) -> np.ndarray:
    Q = as_hermitian(Q, tol=config.PROJECTION_TOL, name=name)
    if np.max(np.abs(Q @ Q - Q)) > config.PROJECTION_TOL:
        raise InvalidInput(f"{name} is not a projection (Q^2 != Q)")
    return Q


def _range_vectors(Q: np.ndarray) -> np.ndarray:
    """Rows ``u_i`` with Gram matrix ``Q``: coordinates of ``Q e_i`` in the range."""
    B = range_basis(Q, tol=0.5)
    if B.shape[1] == 0:
        return np.zeros((Q.shape[0], 1), dtype=complex)
    return B.conj()


def pave_projection_half(Q, eps: float, r: int | None = None) -> PavingCertificate:
    """Pave a projection with constant diagonal 1/2 to ``(1 + eps) / 2``."""
    Q = _projection(Q, "Q")
    if np.max(np.abs(np.diag(Q) - 0.5)) > config.PROJECTION_TOL:
        raise InvalidInput("Q must have every diagonal entry equal to 1/2")
    if r is None:
        r = blocks_for_eps(eps)
    n = Q.shape[0]
    if r >= n:
        # singletons: each compression is a diagonal entry, 1/2
        part = Partition(r, tuple(range(n)))
        notes = ["singleton blocks (r >= size)"]
    elif r > config.MAX_BLOCKS:
        raise BudgetExceeded(f"eps = {eps:g} needs r = {r} blocks, above the cap {config.MAX_BLOCKS}",
                             required=r, cap=config.MAX_BLOCKS)
    else:
        cert = greedy_partition(_range_vectors(Q), r, extend=False)
        part = cert.partition
        notes = [f"greedy evaluator: {cert.evaluator}"]
    return PavingCertificate((1.0 + eps) / 2.0, compressions(Q, part), part, operator_norm(Q),
                             [r], notes=notes)


def pave_projection_delta(P, delta: float | None = None) -> PavingCertificate:
    """Two-block paving of a projection with small diagonal.

    Target ``1/2 + sqrt(2 delta (1 - 2 delta))``. The greedy partition is
    tried first, then the exhaustive search; if both miss, the certificate is
    returned with ``ok`` false instead of raising.
    """
    P = _projection(P, "P")
    diag = np.diag(P).real
    if delta is None:
        delta = float(diag.max())
    if not 0.0 <= delta < 0.25:
        raise InvalidInput(f"delta must lie in [0, 1/4), got {delta:g}")
    if diag.max() > delta + config.PROJECTION_TOL:
        raise InvalidInput(f"diagonal entry {diag.max():.6g} exceeds delta = {delta:g}")
    target = 0.5 + math.sqrt(2.0 * delta * (1.0 - 2.0 * delta))
    part = greedy_partition(_range_vectors(P), 2, extend=False).partition
    ach = compressions(P, part)
    notes = ["greedy"]
    if max(ach) > target + config.CERT_SLACK:
        part = brute_force_partition(_range_vectors(P), 2).partition
        ach = compressions(P, part)
        notes.append("brute-force fallback")
        if max(ach) > target + config.CERT_SLACK:
            notes.append("certificate unmet: the guaranteeing algorithm is outside this package")
    return PavingCertificate(target, ach, part, operator_norm(P), [2], notes=notes)


def pave_reflection(R, eps: float, r: int | None = None) -> PavingCertificate:
    """Pave ``(I + R)/2`` and ``(I - R)/2`` and refine; blocks satisfy ``|P R P| <= eps``."""
    R = as_hermitian(R, tol=config.PROJECTION_TOL, name="R")
    n = R.shape[0]
    if np.max(np.abs(R @ R - np.eye(n))) > 10 * config.PROJECTION_TOL:
        raise InvalidInput("R is not a reflection (R^2 != I)")
    if np.max(np.abs(np.diag(R))) > config.PROJECTION_TOL:
        raise InvalidInput("R must have zero diagonal")
    c1 = pave_projection_half((np.eye(n) + R) / 2.0, eps, r)
    c2 = pave_projection_half((np.eye(n) - R) / 2.0, eps, r)
    part = refine(c1.partition, c2.partition)
    rr = c1.partition.block_count
    return PavingCertificate(eps, compressions(R, part), part, operator_norm(R), [rr, rr * rr],
                             two_sided_ok=two_sided_check(R, part, eps), notes=c1.notes + c2.notes)


def reflection_dilation(S) -> np.ndarray:
    """``[[S, D], [D, -S]]`` with ``D = sqrt(I - S^2)`` for ``||S|| <= 1``."""
    S = as_hermitian(S)
    n = S.shape[0]
    D = psd_sqrt(np.eye(n) - S @ S)
    return np.block([[S, D], [D, -S]])


def pave_selfadjoint(S, eps: float, r: int | None = None) -> PavingCertificate:
    S = as_hermitian(S, name="S")
    n = S.shape[0]
    if np.max(np.abs(np.diag(S))) > config.PROJECTION_TOL * max(1.0, np.max(np.abs(S))):
        raise InvalidInput("S must have zero diagonal")
    norm = operator_norm(S)
    rr = blocks_for_eps(eps) if r is None else r
    if norm <= 1e-14:
        part = Partition(1, (0,) * n)
        return PavingCertificate(eps, [0.0], part, norm, [1], notes=["zero operator"])
    S0 = S / norm
    S0 = S0 - np.diag(np.diag(S0))
    R = reflection_dilation(S0)
    R[np.diag_indices(2 * n)] = 0.0
    inner = pave_reflection(R, eps, rr)
    part = inner.partition.restrict(n)
    return PavingCertificate(eps, compressions(S, part), part, norm,
                             inner.block_ledger + [part.block_count], scale=norm,
                             notes=inner.notes)


def pave_bounded(T, eps: float, r: int | None = None) -> PavingCertificate:
    """Pave ``T`` with zero diagonal to ``2 eps ||T||`` via its Hermitian parts."""
    T = as_square(T, "T")
    n = T.shape[0]
    if np.max(np.abs(np.diag(T))) > config.PROJECTION_TOL * max(1.0, np.max(np.abs(T))):
        raise InvalidInput("T must have zero diagonal")
    S1 = (T + T.conj().T) / 2.0
    S2 = 1j * (T - T.conj().T) / 2.0
    c1 = pave_selfadjoint(S1, eps, r)
    c2 = pave_selfadjoint(S2, eps, r)
    # a zero part contributes a single block; keep the ledger on the full count
    rr = blocks_for_eps(eps) if r is None else r
    k = rr * rr
    p1 = c1.partition if c1.partition.block_count == k else Partition(k, c1.partition.assignment)
    p2 = c2.partition if c2.partition.block_count == k else Partition(k, c2.partition.assignment)
    part = refine(p1, p2)
    ledger = [rr, k, k, k * k]
    return PavingCertificate(2.0 * eps, compressions(T, part), part, operator_norm(T), ledger,
                             notes=c1.notes + c2.notes)
