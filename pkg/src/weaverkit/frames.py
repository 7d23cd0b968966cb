"""Frame-theoretic applications of the partition machinery.

Vector systems are rows of a complex array. The Gram matrix follows
``linalg.gram_matrix``; Riesz bounds of a subsystem are the extreme
eigenvalues of its Gram matrix and frame bounds those of its frame operator.

The Feichtinger and R_eps pipelines search over block counts from small to
large and stop at the first partition whose measured bounds meet the target.
The worst-case counts from the theory are reported in the certificate and
in the budget error when the search runs out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config
from .errors import BudgetExceeded, IllConditioned, InvalidInput
from .linalg import (as_hermitian, as_square, as_vectors, frame_operator, gram_matrix, jacobi_eigh,
                     span_coordinates)
from .partition import Partition, greedy_partition, refine

__all__ = [
    "FrameBounds", "RieszPartitionCertificate", "frame_bounds", "riesz_bounds", "naimark_complement",
    "bessel_riesz_complement_check", "complement_report", "schur_horn_frame", "schur_horn_matrix",
    "completion_parameters", "parseval_completion", "ves_split", "feichtinger_required_r",
    "feichtinger_partition", "dual_riesz_system", "r_epsilon_partition", "bt_partition",
    "fourier_frame_gram", "gram_to_vectors", "is_parseval",
]


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    riesz_lower: float | None = None
    riesz_upper: float | None = None

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper,
                "riesz_lower": self.riesz_lower, "riesz_upper": self.riesz_upper}


def _extremes(A: np.ndarray) -> tuple[float, float]:
    w, _ = jacobi_eigh(A)
    return max(float(w[-1]), 0.0), max(float(w[0]), 0.0)


def frame_bounds(V, riesz: bool = True) -> FrameBounds:
    """Extreme eigenvalues of the frame operator and, with ``riesz``, of the Gram matrix."""
    V = as_vectors(V)
    lo, hi = _extremes(frame_operator(V))
    if not riesz:
        return FrameBounds(lo, hi)
    rlo, rhi = _extremes(gram_matrix(V))
    return FrameBounds(lo, hi, rlo, rhi)


def riesz_bounds(V, block: Sequence[int] | None = None) -> tuple[float, float]:
    V = as_vectors(V)
    if block is not None:
        if len(block) == 0:
            return (math.inf, 0.0)
        V = V[list(block)]
    return _extremes(gram_matrix(V))


def is_parseval(V, tol: float = config.PARSEVAL_TOL) -> bool:
    V = as_vectors(V)
    return float(np.max(np.abs(frame_operator(V) - np.eye(V.shape[1])))) <= tol


# Naimark dilation and complement

def naimark_complement(V, tol: float = config.PARSEVAL_TOL) -> np.ndarray:
    """The system ``(I - G) e_i`` in dimension ``m`` for a Parseval frame with Gram ``G``."""
    V = as_vectors(V)
    if not is_parseval(V, tol):
        raise InvalidInput("naimark_complement needs a Parseval frame")
    G = gram_matrix(V)
    W = np.eye(V.shape[0]) - G
    # row i holds the coordinates of column i of I - G
    return W.T.copy()


@dataclass
class ComplementReport:
    identity_error: float
    bessel: float  # top eigenvalue of Gram_J(V)
    complement_lower: float  # bottom eigenvalue of Gram_J(complement)
    delta: float
    equivalent: bool

    @property
    def ok(self) -> bool:
        return self.identity_error <= 1e-10 and self.equivalent


def complement_report(V, J: Sequence[int], delta: float) -> ComplementReport:
    """Check ``Gram_J(V) + Gram_J(W) = I_J`` and the Bessel/Riesz equivalence on ``J``."""
    V = as_vectors(V)
    W = naimark_complement(V)
    J = sorted(set(int(j) for j in J))
    if any(not 0 <= j < V.shape[0] for j in J):
        raise InvalidInput("subset index out of range")
    if not J:
        return ComplementReport(0.0, 0.0, 1.0, delta, True)
    GV = gram_matrix(V[J])
    GW = gram_matrix(W[J])
    err = float(np.max(np.abs(GV + GW - np.eye(len(J)))))
    bessel = float(jacobi_eigh(GV)[0][0])
    lower = float(jacobi_eigh(GW)[0][-1])
    slack = 1e-9
    left = bessel <= 1.0 - delta
    right = lower >= delta
    # the two predicates may disagree only inside the rounding band at the threshold
    near = abs(bessel - (1.0 - delta)) <= slack or abs(lower - delta) <= slack
    equivalent = abs((1.0 - bessel) - lower) <= slack and (left == right or near)
    return ComplementReport(err, bessel, lower, delta, equivalent)


def bessel_riesz_complement_check(V, J: Sequence[int], delta: float) -> bool:
    return complement_report(V, J, delta).ok


# Schur-Horn construction

def _check_majorization(lam: np.ndarray, dsq: np.ndarray, tol: float = 1e-10) -> None:
    if lam.shape != dsq.shape or lam.ndim != 1 or lam.size == 0:
        raise InvalidInput("spectrum and norms must be non-empty sequences of equal length")
    if np.any(np.diff(lam) > tol) or np.any(np.diff(dsq) > tol):
        raise InvalidInput("spectrum and norms must be non-increasing")
    scale = max(1.0, float(np.max(np.abs(lam))))
    if abs(lam.sum() - dsq.sum()) > tol * scale * lam.size:
        raise InvalidInput("majorization fails: totals differ")
    gap = np.cumsum(dsq) - np.cumsum(lam)
    if np.max(gap) > tol * scale * lam.size:
        raise InvalidInput(f"majorization fails at partial sum {int(np.argmax(gap)) + 1}")


def schur_horn_matrix(spectrum, norms) -> tuple[np.ndarray, np.ndarray]:
    """Unitary ``W`` with ``W diag(spectrum) W^*`` having diagonal ``norms``.

    Each step fixes the largest remaining target ``t``: with ``a_i`` the
    smallest remaining diagonal entry at least ``t`` and ``a_j`` the largest
    one below it, a rotation in the ``(i, j)`` plane moves ``t`` to position
    ``i`` and ``a_i + a_j - t`` to ``j``. The remaining diagonal still
    majorizes the remaining targets, so the loop never stalls.
    Returns ``(W, H)`` with ``H`` the constructed Hermitian matrix.
    """
    lam = np.asarray(spectrum, dtype=float).reshape(-1)
    dsq = np.asarray(norms, dtype=float).reshape(-1)
    _check_majorization(lam, dsq)
    n = lam.size
    H = np.diag(lam).astype(complex)
    U = np.eye(n, dtype=complex)  # H = U^* diag(lam) U
    free = list(range(n))
    placed = [0] * n
    for k in range(n):
        t = dsq[k]
        a = np.real(np.diag(H))
        above = [p for p in free if a[p] >= t]
        below = [p for p in free if a[p] < t]
        if not above:
            i = max(free, key=lambda p: a[p])
        else:
            i = min(above, key=lambda p: a[p])
        if below and a[i] - t > 0.0:
            j = max(below, key=lambda p: a[p])
            ai, aj, b = a[i], a[j], H[i, j]
            c2 = min(1.0, max(0.0, (t - aj) / (ai - aj)))
            c, s = math.sqrt(c2), math.sqrt(1.0 - c2)
            # the phase makes the cross term purely imaginary so it drops out
            theta = math.pi / 2 - (np.angle(b) if b != 0 else 0.0)
            ph = complex(math.cos(theta), math.sin(theta))
            R = np.array([[c, -s], [s * ph, c * ph]], dtype=complex)
            idx = [i, j]
            H[:, idx] = H[:, idx] @ R
            H[idx, :] = R.conj().T @ H[idx, :]
            U[:, idx] = U[:, idx] @ R
        H[i, i] = t
        placed[k] = i
        free.remove(i)
    perm = np.array(placed)
    H = H[np.ix_(perm, perm)]
    U = U[:, perm]
    H = 0.5 * (H + H.conj().T)
    return U.conj().T, H


def schur_horn_frame(spectrum, norms) -> np.ndarray:
    """``M`` vectors in ``C^M`` with frame operator ``diag(spectrum)`` and squared norms ``norms``."""
    lam = np.asarray(spectrum, dtype=float).reshape(-1)
    if np.any(lam < -1e-12):
        raise InvalidInput("a frame operator spectrum must be non-negative")
    W, _ = schur_horn_matrix(lam, norms)
    # v_i = diag(sqrt(lam)) W^* e_i, stored as rows
    return W.conj() * np.sqrt(np.clip(lam, 0.0, None))[None, :]


# Parseval completion and the two-Riesz split

def completion_parameters(V, eps: float, max_extra: int = 10_000) -> tuple[int, float]:
    """Smallest ``N`` with ``C = (N + sum(1 - lambda_i)) / (d + N) >= eps``, and that ``C``."""
    V = as_vectors(V)
    d = V.shape[1]
    w = np.clip(jacobi_eigh(frame_operator(V))[0], 0.0, None)
    if w[0] > 1.0 + 1e-10:
        raise InvalidInput(f"Bessel bound {w[0]:.12g} exceeds 1")
    slack = float(np.sum(1.0 - np.minimum(w, 1.0)))
    if eps <= slack / d + 1e-15:
        return 0, slack / d
    if slack >= d or eps >= 1.0:
        raise BudgetExceeded(f"no completion reaches squared norm {eps:g}", required=math.inf,
                             cap=max_extra)
    n = math.ceil((eps * d - slack) / (1.0 - eps) - 1e-12)
    if n > max_extra:
        raise BudgetExceeded(f"completion needs {n} extra dimensions", required=n, cap=max_extra)
    return n, (n + slack) / (d + n)


def parseval_completion(V, eps: float) -> np.ndarray:
    """Append ``d + N`` equal-norm vectors in ``C^(d+N)`` making the system Parseval."""
    V = as_vectors(V)
    m, d = V.shape
    norms = np.sum(np.abs(V) ** 2, axis=1)
    if eps > 0.0 and norms.min() < eps - 1e-10:
        raise InvalidInput(f"a squared norm {norms.min():.6g} is below eps = {eps:g}")
    n, C = completion_parameters(V, eps)
    w, U = jacobi_eigh(frame_operator(V))  # descending
    w = np.clip(w, 0.0, 1.0)
    D = d + n
    spectrum = np.concatenate([np.ones(n), 1.0 - w[::-1]])
    X = schur_horn_frame(spectrum, np.full(D, spectrum.sum() / D))
    Q = np.zeros((D, D), dtype=complex)
    for k in range(n):
        Q[d + k, k] = 1.0
    Q[:d, n:] = U[:, ::-1]
    extra = X @ Q.T
    base = np.hstack([V.astype(complex), np.zeros((m, n), dtype=complex)])
    return np.vstack([base, extra])


def ves_split(U, threshold: float = config.VES_THRESHOLD) -> Partition:
    """Two blocks with Riesz lower bound ``1 - (1/2 + sqrt(2 delta) + delta)``, ``delta = 1 - threshold``.

    The input is Bessel with bound 1 and squared norms at least ``threshold``.
    A non-Parseval input is completed first; the Naimark complement of the
    resulting Parseval frame has squared norms at most ``delta`` and is split
    into two blocks of small Bessel bound, which are Riesz blocks of the
    original system.
    """
    U = span_coordinates(as_vectors(U))
    n = U.shape[0]
    full = U if is_parseval(U) else parseval_completion(U, threshold)
    comp = span_coordinates(naimark_complement(full))
    cert = greedy_partition(comp, 2, extend=False)
    return cert.partition.restrict(n)


# Riesz partitions

@dataclass
class RieszPartitionCertificate:
    partition: Partition
    per_block_riesz: list[tuple[float, float]]  # non-empty blocks, in block order
    guaranteed: tuple[float, float]
    epsilon: float
    required_r: float | None = None
    size_bound: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        lo, hi = self.guaranteed
        return all(a >= lo - config.CERT_SLACK and b <= hi + config.CERT_SLACK
                   for a, b in self.per_block_riesz)

    def to_dict(self) -> dict:
        return {"r": self.partition.block_count, "assignment": list(self.partition.assignment),
                "per_block_riesz": [list(p) for p in self.per_block_riesz],
                "guaranteed": list(self.guaranteed), "epsilon": self.epsilon,
                "required_r": self.required_r, "size_bound": self.size_bound,
                "notes": list(self.notes), "ok": self.ok}


def _block_riesz(V: np.ndarray, part: Partition) -> list[tuple[float, float]]:
    return [riesz_bounds(V, b) for b in part.nonempty_blocks()]


def _compact(part: Partition) -> Partition:
    """Relabel so that only non-empty blocks remain, in order of first use."""
    return Partition.from_blocks(part.nonempty_blocks(), part.size)


def feichtinger_required_r(eps: float, threshold: float = config.VES_THRESHOLD) -> int:
    """Smallest ``r`` with ``eps >= threshold * (1/sqrt(r) + sqrt(eps))**2``."""
    gap = math.sqrt(eps / threshold) - math.sqrt(eps)
    if gap <= 0.0:
        raise InvalidInput("threshold must be below 1")
    return math.ceil(1.0 / gap**2 - 1e-9)


def feichtinger_partition(V, eps: float | None = None, threshold: float = config.VES_THRESHOLD,
                          max_blocks: int = config.MAX_BLOCKS) -> RieszPartitionCertificate:
    """Riesz partition of a Bessel-1 system with squared norms at least ``eps``.

    Vectors are first rescaled to squared norm ``eps``. For ``r' = 1, 2, ...``
    the greedy partition into ``r'`` blocks is accepted once every block has
    Bessel bound at most ``eps / threshold``; a block whose Riesz lower bound
    is below ``eps / 50`` is split in two by :func:`ves_split`. Block ``k``
    of the first stage owns labels ``2k`` and ``2k + 1``, so the size is
    ``2 r'``. The search stops at the smaller of the block cap, ``m`` and the
    worst-case ``r`` from the theory, then raises :class:`BudgetExceeded`.
    """
    V = as_vectors(V)
    m = V.shape[0]
    norms = np.sum(np.abs(V) ** 2, axis=1)
    if eps is None:
        eps = float(norms.min())
    if not 0.0 < eps <= 1.0:
        raise InvalidInput(f"eps must lie in (0, 1], got {eps:g}")
    if norms.min() < eps - 1e-10:
        raise InvalidInput(f"a squared norm {norms.min():.6g} is below eps = {eps:g}")
    if jacobi_eigh(frame_operator(V))[0][0] > 1.0 + 1e-10:
        raise InvalidInput("the system must be Bessel with bound at most 1")
    U = V * np.sqrt(eps / norms)[:, None]
    r_req = feichtinger_required_r(eps, threshold)
    upper = eps / threshold
    lower = eps / config.RIESZ_LOWER_DIVISOR
    simple_r = 9.0 / eps * (threshold / (1.0 - threshold)) ** 2
    notes = [f"worst-case r = {r_req}; sufficient r from the simplified inequality = {simple_r:.6g}"]
    limit = min(m, max_blocks, r_req)
    for rp in range(1, limit + 1):
        first = Partition(1, (0,) * m) if rp == 1 else greedy_partition(U, rp, extend=False).partition
        blocks = first.blocks()
        if any(b and _extremes(frame_operator(U[b]))[1] > upper + config.CERT_SLACK for b in blocks):
            continue
        halves = [0] * m
        split_notes = []
        try:
            for k, b in enumerate(blocks):
                if not b or riesz_bounds(U, b)[0] >= lower:
                    continue
                sub = ves_split(U[b] * math.sqrt(threshold / eps), threshold)
                for i, a in zip(b, sub.assignment):
                    halves[i] = a
                split_notes.append(f"block {k} split in two")
        except BudgetExceeded as exc:
            notes.append(f"r' = {rp}: split skipped ({exc})")
            continue
        part = refine(first, Partition(2, tuple(halves)))
        cert = RieszPartitionCertificate(part, _block_riesz(U, part), (lower, upper), eps,
                                         required_r=2 * r_req, size_bound=2.0 * r_req,
                                         notes=notes + [f"first stage r' = {rp}"] + split_notes)
        if cert.ok:
            return cert
    raise BudgetExceeded(f"no partition with at most {limit} first-stage blocks met the bounds; "
                         f"the theory asks for r = {r_req}", required=r_req, cap=limit)


def dual_riesz_system(V, J: Sequence[int] | None = None, max_condition: float = 1e12) -> np.ndarray:
    """Biorthogonal system ``u*_i = sum_j (G^-1)_{ji} u_j`` of ``{u_i}_{i in J}``."""
    V = as_vectors(V)
    if J is not None:
        J = list(J)
        if not J or any(not 0 <= j < V.shape[0] for j in J):
            raise InvalidInput("J must be a non-empty subset of the index range")
        V = V[J]
    G = gram_matrix(V)
    lo, hi = _extremes(G)
    if lo <= 0.0 or hi / lo > max_condition:
        cond = math.inf if lo <= 0.0 else hi / lo
        raise IllConditioned(f"Gram condition number {cond:.3e} exceeds {max_condition:.1e}")
    return np.linalg.solve(G, np.eye(G.shape[0])).T @ V


def _tighten(V: np.ndarray, eps: float, max_blocks: int) -> tuple[Partition, int]:
    """Split a Riesz system into blocks with Riesz bounds in ``[1 - eps, 1 + eps]``.

    Blocks of the system and of its dual are both pushed to small Bessel
    bounds by greedy partitions, and the common refinement is checked. A
    dual block with Bessel bound ``b`` forces a primal lower bound of at
    least ``1 / b``.
    """
    m = V.shape[0]
    dual = dual_riesz_system(V)
    hi = _extremes(frame_operator(V))[1]
    hi_dual = _extremes(frame_operator(dual))[1]
    r_req = math.ceil(max(hi, hi_dual) / (math.sqrt(1.0 + eps) - 1.0) ** 2 - 1e-9)
    limit = min(m, max_blocks, r_req)
    for rp in range(2, limit + 1):
        p1 = greedy_partition(V / math.sqrt(hi), rp, extend=False).partition
        p2 = greedy_partition(dual / math.sqrt(hi_dual), rp, extend=False).partition
        part = _compact(refine(p1, p2))
        if all(a >= 1.0 - eps - config.CERT_SLACK and b <= 1.0 + eps + config.CERT_SLACK
               for a, b in _block_riesz(V, part)):
            return part, rp
    raise BudgetExceeded(f"no refinement with at most {limit} blocks per side met [1 - eps, 1 + eps]; "
                         f"the theory asks for r = {r_req}", required=r_req, cap=limit)


def r_epsilon_partition(V, eps: float, max_blocks: int = config.MAX_BLOCKS) -> RieszPartitionCertificate:
    """Partition a unit-norm Bessel system into Riesz blocks with bounds ``1 -+ eps``."""
    V = as_vectors(V)
    if not 0.0 < eps < 1.0:
        raise InvalidInput(f"eps must lie in (0, 1), got {eps:g}")
    norms = np.sum(np.abs(V) ** 2, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-8:
        raise InvalidInput("r_epsilon_partition needs unit-norm vectors")
    B = max(_extremes(frame_operator(V))[1], 1.0)
    fc = feichtinger_partition(V / math.sqrt(B), eps=1.0 / B, max_blocks=max_blocks)
    blocks: list[list[int]] = []
    notes = [f"Bessel bound B = {B:.12g}", f"Feichtinger stage: {len(fc.partition.nonempty_blocks())} parts"]
    for k, part in enumerate(fc.partition.nonempty_blocks()):
        lo, hi = riesz_bounds(V, part)
        if lo >= 1.0 - eps and hi <= 1.0 + eps:
            blocks.append(part)
            continue
        sub, rp = _tighten(V[part], eps, max_blocks)
        notes.append(f"part {k} tightened with r = {rp} per side")
        blocks.extend([[part[i] for i in b] for b in sub.nonempty_blocks()])
    final = Partition.from_blocks(blocks, V.shape[0])
    size = B / eps**4
    cert = RieszPartitionCertificate(final, _block_riesz(V, final), (1.0 - eps, 1.0 + eps), eps,
                                     required_r=fc.required_r, size_bound=size, notes=notes)
    return cert


def bt_partition(Tmat, eps: float, max_blocks: int = config.MAX_BLOCKS) -> RieszPartitionCertificate:
    """Coordinate blocks on which ``T`` is a ``(1 -+ eps)`` isometry (squared norms)."""
    T = np.asarray(Tmat, dtype=complex)
    if T.ndim != 2 or T.size == 0 or not np.all(np.isfinite(T)):
        raise InvalidInput("T must be a finite non-empty matrix")
    cols = np.sum(np.abs(T) ** 2, axis=0)
    if np.max(np.abs(cols - 1.0)) > 1e-8:
        raise InvalidInput("the columns of T must have unit norm")
    cert = r_epsilon_partition(T.T, eps, max_blocks)
    cert.notes.append("per-block bounds bound ||T f||^2 / ||f||^2 for f supported on the block")
    return cert


# Fourier frames

def fourier_frame_gram(intervals: Sequence[Sequence[float]], N: int) -> np.ndarray:
    """Gram matrix ``<phi_n, phi_m>`` of ``e^{2 pi i n t} 1_E`` for ``n, m in [-N, N]``."""
    if N < 1:
        raise InvalidInput("N must be at least 1")
    iv = sorted((float(a), float(b)) for a, b in intervals)
    if not iv:
        raise InvalidInput("at least one interval is needed")
    for a, b in iv:
        if not 0.0 <= a < b <= 1.0:
            raise InvalidInput(f"interval ({a:g}, {b:g}) is not a proper subinterval of [0, 1]")
    for (a1, b1), (a2, b2) in zip(iv, iv[1:]):
        if a2 < b1:
            raise InvalidInput("intervals overlap")
    n = np.arange(-N, N + 1)
    kappa = n[:, None] - n[None, :]
    G = np.zeros(kappa.shape, dtype=complex)
    nz = kappa != 0
    for a, b in iv:
        k = kappa[nz]
        G[nz] += (np.exp(2j * np.pi * k * b) - np.exp(2j * np.pi * k * a)) / (2j * np.pi * k)
        G[~nz] += b - a
    return G


def gram_to_vectors(G, tol: float = 1e-12) -> np.ndarray:
    """A vector system whose Gram matrix (in ``gram_matrix`` convention) is ``G``."""
    G = as_hermitian(as_square(G, "Gram matrix"), tol=1e-10)
    w, U = jacobi_eigh(G)
    if w[-1] < -1e-10:
        raise InvalidInput("a Gram matrix must be PSD")
    keep = w > tol * max(1.0, w[0])
    if not np.any(keep):
        keep[0] = True
    return (U[:, keep] * np.sqrt(np.clip(w[keep], 0.0, None))[None, :]).conj()
