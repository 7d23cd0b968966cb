"""Weaver partitions by greedy conditioning of the block-lifted random model.

Lifting ``u_1..u_m`` in ``C^d`` to ``r`` blocks makes ``v_i = sqrt(r) u_i``
land in a uniformly random block of ``C^(r d)``. Every realization is
block diagonal, so its characteristic polynomial is the product of the
block polynomials, and a block holding the index set ``X`` contributes
``det(zI - r sum_{i in X} u_i u_i^*)`` whose coefficients are sums of
principal minors of the Gram matrix. All evaluators below work on those
minors, never on ``r d`` dimensional matrices.

The greedy rule fixes indices in input order, each time to the block whose
conditional expected characteristic polynomial has the smallest top root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from . import config
from .errors import BudgetExceeded, InternalError, InvalidInput
from .linalg import as_vectors, frame_operator, gram_matrix, jacobi_eigh, lambda_max
from .mixed import RandomRankOneModel
from .poly import RealPolynomial, maxroot_with_error


@dataclass(frozen=True)
class Partition:
    block_count: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        if self.block_count < 1:
            raise InvalidInput("a partition needs at least one block")
        if any(not 0 <= a < self.block_count for a in self.assignment):
            raise InvalidInput("assignment entries must lie in [0, block_count)")

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], m: int | None = None) -> Partition:
        m = sum(len(b) for b in blocks) if m is None else m
        assign = [-1] * m
        for k, b in enumerate(blocks):
            for i in b:
                if assign[i] != -1:
                    raise InvalidInput(f"index {i} appears in two blocks")
                assign[i] = k
        if -1 in assign:
            raise InvalidInput("blocks do not cover the index range")
        return cls(len(blocks), tuple(assign))

    @property
    def size(self) -> int:
        return len(self.assignment)

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for i, k in enumerate(self.assignment):
            out[k].append(i)
        return out

    def nonempty_blocks(self) -> list[list[int]]:
        """Non-empty blocks in label order; cheap even for huge block counts."""
        groups: dict[int, list[int]] = {}
        for i, k in enumerate(self.assignment):
            groups.setdefault(k, []).append(i)
        return [groups[k] for k in sorted(groups)]

    def restrict(self, m: int) -> Partition:
        """Keep the first ``m`` indices; block labels are unchanged."""
        return Partition(self.block_count, self.assignment[:m])

    def to_dict(self) -> dict:
        return {"block_count": self.block_count, "assignment": list(self.assignment)}


def refine(p1: Partition, p2: Partition) -> Partition:
    """Blocks ``A_i & B_j`` in row-major order; empty intersections are kept."""
    if p1.size != p2.size:
        raise InvalidInput("partitions cover different index ranges")
    r2 = p2.block_count
    return Partition(p1.block_count * r2,
                     tuple(a * r2 + b for a, b in zip(p1.assignment, p2.assignment)))


def block_bessel(V, partition: Partition) -> list[float]:
    """Top eigenvalue of each block's frame operator (0 for empty blocks)."""
    V = as_vectors(V)
    out = []
    for b in partition.blocks():
        out.append(max(lambda_max(frame_operator(V[b])), 0.0) if b else 0.0)
    return out


def weaver_bound(r: int, delta: float) -> float:
    return (1.0 / math.sqrt(r) + math.sqrt(delta)) ** 2


@dataclass
class PartitionCertificate:
    partition: Partition
    per_block_bessel: list[float]
    guaranteed_bound: float
    delta: float
    maxroot_trace: list[float] = field(default_factory=list)
    evaluator: str = ""
    extended_by: int = 0

    @property
    def r(self) -> int:
        return self.partition.block_count

    @property
    def achieved(self) -> float:
        return max(self.per_block_bessel)

    @property
    def ok(self) -> bool:
        return self.achieved <= self.guaranteed_bound + config.CERT_SLACK

    def to_dict(self) -> dict:
        return {"r": self.r, "assignment": list(self.partition.assignment),
                "per_block_bessel": list(self.per_block_bessel), "delta": self.delta,
                "guaranteed_bound": self.guaranteed_bound, "maxroot_trace": list(self.maxroot_trace),
                "evaluator": self.evaluator, "extended_by": self.extended_by, "ok": self.ok}


def lift_to_blocks(V, r: int) -> RandomRankOneModel:
    """Index ``i`` becomes ``sqrt(r) u_i`` placed in block ``k`` with probability ``1/r``."""
    V = as_vectors(V)
    if r < 1:
        raise InvalidInput("r must be positive")
    m, d = V.shape
    values = []
    for i in range(m):
        vals = np.zeros((r, r * d), dtype=complex)
        for k in range(r):
            vals[k, k * d:(k + 1) * d] = math.sqrt(r) * V[i]
        values.append(vals)
    return RandomRankOneModel(r * d, tuple(values), tuple(np.full(r, 1.0 / r) for _ in range(m)))


def extend_to_parseval(V, delta: float | None = None, tol: float = 1e-10) -> np.ndarray:
    """Append scaled eigenvectors of ``I - S`` so the system becomes Parseval.

    An eigenvalue ``w`` is split into ``ceil(w / delta)`` equal copies so that
    no appended vector has squared norm above ``delta``; eigenvalues are taken
    in ascending order.
    """
    V = as_vectors(V)
    S = frame_operator(V)
    w, U = jacobi_eigh(np.eye(V.shape[1]) - S)
    if w[-1] < -tol:
        raise InvalidInput(f"Bessel bound {1.0 - w[-1]:.12g} exceeds 1")
    if delta is None:
        delta = float(np.max(np.sum(np.abs(V) ** 2, axis=1)))
    if delta <= 0.0:
        delta = 1.0
    extra = []
    for k in np.argsort(w, kind="stable"):
        if w[k] <= tol:
            continue
        n = max(1, math.ceil(w[k] / delta - 1e-12))
        vec = math.sqrt(w[k] / n) * U[:, k]
        extra.extend([vec] * n)
    if not extra:
        return V.copy()
    return np.vstack([V, np.array(extra)])


def _popcounts(m: int) -> np.ndarray:
    pc = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        pc[1 << b:1 << (b + 1)] = pc[: 1 << b] + 1
    return pc


def _zeta(a: np.ndarray, m: int) -> np.ndarray:
    """Subset-sum transform along the last axis (length ``2**m``), in place."""
    lead = a.shape[:-1]
    for b in range(m):
        v = a.reshape(lead + (1 << (m - b - 1), 2, 1 << b))
        v[..., 1, :] += v[..., 0, :]
    return a


class LiftedEvaluator:
    """Expected characteristic polynomials of the ``r``-block lift of a system.

    ``poly(assign)`` takes an assignment with ``-1`` for free indices. The
    lifted expectation equals a sum over ordered tuples of disjoint index
    sets, one per block, of products of per-block principal-minor functions.
    Three evaluators compute it:

    * disjoint-convolution: the subset convolution over every pair
      ``T subset U`` (``3**m`` terms, all non-negative);
    * block-enumeration: the average over every completion of the
      assignment of the product of block polynomials (non-negative terms);
    * ranked-convolution: ranked zeta transforms, with the disjointness
      recovered by an alternating binomial sum. It is the only option for
      large ``m`` and loses accuracy to cancellation when the top root is
      highly multiple.
    """

    def __init__(self, V, r: int, enumeration_cap: int = config.BLOCK_ENUMERATION_CAP):
        V = as_vectors(V)
        self.m, self.d = V.shape
        self.r = r
        self.cap = enumeration_cap
        if self.m > config.SUBSET_UNIVERSE_CAP:
            raise BudgetExceeded(f"{self.m} vectors exceed the subset-table cap "
                                 f"{config.SUBSET_UNIVERSE_CAP}", required=self.m,
                                 cap=config.SUBSET_UNIVERSE_CAP)
        m = self.m
        self.J = min(self.d, m)
        G = gram_matrix(V)
        self.pc = _popcounts(m)
        minors = np.zeros(1 << m)
        minors[0] = 1.0
        for j in range(1, self.J + 1):
            combos = np.array(list(itertools.combinations(range(m), j)), dtype=np.int64)
            masks = np.sum(np.int64(1) << combos, axis=1)
            sub = G[combos[:, :, None], combos[:, None, :]]
            minors[masks] = np.clip(np.linalg.det(sub).real, 0.0, None)
        self.minors = minors
        ranked = np.zeros((self.J + 1, 1 << m))
        for j in range(self.J + 1):
            sel = self.pc == j
            ranked[j, sel] = minors[sel]
        self._ranked_minors = ranked
        self._table = None
        self._pair_cache = None
        self._power_cache: dict = {}
        self.last_method = ""

    # block characteristic polynomials ascending in z, degree d, for all subsets
    def table(self) -> np.ndarray:
        if self._table is None:
            g = _zeta(self._ranked_minors.copy(), self.m)
            t = np.zeros((1 << self.m, self.d + 1))
            for j in range(self.J + 1):
                t[:, self.d - j] = (-self.r) ** j * g[j]
            self._table = t
        return self._table

    def full_degree(self) -> int:
        return self.r * self.d

    def poly(self, assign: Sequence[int]) -> RealPolynomial:
        assign = np.asarray(assign, dtype=np.int64)
        free = np.nonzero(assign < 0)[0]
        if 3 ** self.m <= config.SUBMASK_PAIR_CAP:
            self.last_method = "disjoint-convolution"
            return self._disjoint(assign, free)
        if float(self.r) ** free.size <= self.cap:
            self.last_method = "block-enumeration"
            return self._enumerate(assign, free)
        self.last_method = "ranked-convolution"
        return self._convolve(assign, free)

    # non-negative disjoint subset convolution over all (U, T subset U) pairs
    def _pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._pair_cache is None:
            U = np.zeros(1, dtype=np.int64)
            T = np.zeros(1, dtype=np.int64)
            for b in range(self.m):
                bit = np.int64(1) << b
                U = np.concatenate([U, U | bit, U | bit])
                T = np.concatenate([T, T, T | bit])
            self._pair_cache = (U, T, U ^ T)
        return self._pair_cache

    def _dconv(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        U, T, R = self._pairs()
        w = a[T] * b[R]
        return np.bincount(U, weights=w, minlength=1 << self.m)

    def _block_function(self, fmask: int, free_mask: int) -> np.ndarray:
        allmask = np.arange(1 << self.m, dtype=np.int64)
        allowed = (allmask & ~(fmask | free_mask)) == 0
        return np.where(allowed, self.minors * float(self.r) ** self.pc[allmask & fmask], 0.0)

    def _empty_power(self, free_mask: int, e: int) -> np.ndarray:
        key = (free_mask, e)
        if key not in self._power_cache:
            base = self._block_function(0, free_mask)
            result = None
            while e:
                if e & 1:
                    result = base if result is None else self._dconv(result, base)
                e >>= 1
                if e:
                    base = self._dconv(base, base)
            self._power_cache = {key: result}
        return self._power_cache[key]

    def _disjoint(self, assign: np.ndarray, free: np.ndarray) -> RealPolynomial:
        free_mask = int(np.sum(np.int64(1) << free.astype(np.int64))) if free.size else 0
        fixed = self._fixed_masks(assign)
        h = None
        empties = 0
        for k in range(self.r):
            if fixed[k] == 0:
                empties += 1
                continue
            f = self._block_function(int(fixed[k]), free_mask)
            h = f if h is None else self._dconv(h, f)
        if empties:
            E = self._empty_power(free_mask, empties)
            h = E if h is None else self._dconv(h, E)
        K = min(self.m, self.r * self.d)
        e = np.bincount(self.pc, weights=h, minlength=self.m + 1)[: K + 1]
        full = np.zeros(self.r * self.d + 1)
        for t in range(K + 1):
            full[self.r * self.d - t] = (-1) ** t * e[t]
        full[-1] = 1.0
        return RealPolynomial(full, monic=True)

    def _fixed_masks(self, assign: np.ndarray) -> np.ndarray:
        masks = np.zeros(self.r, dtype=np.int64)
        for i, k in enumerate(assign):
            if k >= 0:
                masks[k] |= 1 << i
        return masks

    def _enumerate(self, assign: np.ndarray, free: np.ndarray) -> RealPolynomial:
        table = self.table()
        fixed = self._fixed_masks(assign)
        n = free.size
        total = self.r ** n
        acc = np.zeros(self.r * self.d + 1)
        chunk = max(1, 200_000 // max(1, self.r))
        bits = np.int64(1) << free.astype(np.int64)
        for start in range(0, total, chunk):
            codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
            digits = np.empty((codes.size, n), dtype=np.int64)
            rest = codes.copy()
            for j in range(n):
                digits[:, j] = rest % self.r
                rest //= self.r
            prod_ = None
            for k in range(self.r):
                masks = fixed[k] + ((digits == k) * bits).sum(axis=1) if n else np.full(codes.size, fixed[k])
                p = table[masks]
                prod_ = p if prod_ is None else _mul_rows(prod_, p)
            acc += prod_.sum(axis=0)
        acc /= total
        acc[-1] = 1.0
        return RealPolynomial(acc, monic=True)

    def _convolve(self, assign: np.ndarray, free: np.ndarray) -> RealPolynomial:
        m, r = self.m, self.r
        K = min(m, r * self.d)
        free_mask = int(np.sum(np.int64(1) << free.astype(np.int64))) if free.size else 0
        fixed = self._fixed_masks(assign)
        allmask = np.arange(1 << m, dtype=np.int64)
        h = None
        empties = 0
        for k in range(r):
            if fixed[k] == 0:
                empties += 1
                continue
            h = _mul_ranked(h, self._block_transform(allmask, fixed[k], free_mask), K)
        if empties:
            h = _mul_ranked(h, _pow_ranked(self._block_transform(allmask, 0, free_mask), empties, K), K)
        size = self.pc
        e = np.zeros(K + 1)
        for t in range(K + 1):
            s = size <= t
            coef = np.array([(-1) ** (t - x) * comb(m - x, t - x) if x <= t else 0
                             for x in range(m + 1)], dtype=float)
            e[t] = float(np.dot(h[t, s], coef[size[s]])) if t < h.shape[0] else 0.0
        reduced = np.zeros(K + 1)
        for t in range(K + 1):
            reduced[K - t] = (-1) ** t * e[t]
        full = np.zeros(r * self.d + 1)
        full[r * self.d - K:] = reduced
        return RealPolynomial(full, monic=True)

    def _block_transform(self, allmask: np.ndarray, fmask: int, free_mask: int) -> np.ndarray:
        allowed = (allmask & ~(fmask | free_mask)) == 0
        weight = np.where(allowed, float(self.r) ** _popcounts_of(allmask & fmask, self.pc), 0.0)
        return _zeta(self._ranked_minors * weight, self.m)


def _popcounts_of(masks: np.ndarray, pc: np.ndarray) -> np.ndarray:
    return pc[masks]


def _mul_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0], a.shape[1] + b.shape[1] - 1))
    for j in range(a.shape[1]):
        out[:, j:j + b.shape[1]] += a[:, j, None] * b
    return out


def _mul_ranked(a: np.ndarray | None, b: np.ndarray, K: int) -> np.ndarray:
    if a is None:
        return b[: K + 1].copy()
    n = min(K + 1, a.shape[0] + b.shape[0] - 1)
    out = np.zeros((n, a.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            if i + j < n:
                out[i + j] += a[i] * b[j]
    return out


def _pow_ranked(a: np.ndarray, e: int, K: int) -> np.ndarray:
    result = None
    base = a
    while e:
        if e & 1:
            result = _mul_ranked(result, base, K)
        e >>= 1
        if e:
            base = _mul_ranked(base, base, K)
    return result


def _greedy_assign(V: np.ndarray, r: int, cap: int) -> tuple[list[int], list[float], str]:
    ev = LiftedEvaluator(V, r, cap)
    m = ev.m
    assign = [-1] * m
    methods = set()
    root, err = maxroot_with_error(ev.poly(assign))
    trace = [root]
    methods.add(ev.last_method)
    for i in range(m):
        used = sorted(set(a for a in assign if a >= 0))
        empty = [k for k in range(r) if k not in used]
        candidates = used + empty[:1]
        load = {k: assign.count(k) for k in candidates}
        best_k, best, best_err = None, math.inf, 0.0
        for k in sorted(candidates):
            assign[i] = k
            root, e = maxroot_with_error(ev.poly(assign))
            methods.add(ev.last_method)
            tie = abs(root - best) <= 1e-12 * (1.0 + abs(best))
            # exact ties go to the lighter block, then the lower index
            if best_k is None or (root < best and not tie) or (tie and load[k] < load[best_k]):
                best_k, best, best_err = k, root, e
        assign[i] = best_k
        # the averaging argument gives monotonicity exactly; allow for rounding
        slack = max(1e-8 * max(1.0, abs(trace[-1])), 10.0 * (err + best_err))
        if best > trace[-1] + slack:
            raise InternalError(f"greedy max root increased from {trace[-1]!r} to {best!r} at index {i}")
        trace.append(best)
        err = best_err
    return assign, trace, "+".join(sorted(methods))


def greedy_partition(V, r: int, extend: bool = True,
                     enumeration_cap: int = config.BLOCK_ENUMERATION_CAP) -> PartitionCertificate:
    """Weaver partition of a Bessel-1 system into ``r`` blocks.

    Indices are placed in input order, each in the block whose conditioning
    gives the smallest max root; exact ties go to the block holding fewer
    vectors, then to the lower block index.

    With ``extend`` (the default) a non-Parseval system is first completed to
    a Parseval one, partitioned, and the partition restricted to the original
    indices, which is the setting of the bound. With ``extend=False`` the
    greedy runs on the system as given; the certificate still reports the
    measured block bounds against the same guaranteed value.
    """
    V = as_vectors(V)
    if r < 1:
        raise InvalidInput("r must be positive")
    if r > config.MAX_BLOCKS:
        raise BudgetExceeded(f"r = {r} exceeds the block cap {config.MAX_BLOCKS}",
                             required=r, cap=config.MAX_BLOCKS)
    m = V.shape[0]
    delta = float(np.max(np.sum(np.abs(V) ** 2, axis=1)))
    W = V
    if extend:
        S = frame_operator(V)
        if np.max(np.abs(S - np.eye(V.shape[1]))) > config.PARSEVAL_TOL:
            W = extend_to_parseval(V, delta)
    elif lambda_max(frame_operator(V)) > 1.0 + 1e-10:
        raise InvalidInput("the system must be Bessel with bound at most 1")
    assign, trace, method = _greedy_assign(W, r, enumeration_cap)
    part = Partition(r, tuple(assign)).restrict(m)
    return PartitionCertificate(part, block_bessel(V, part), weaver_bound(r, delta), delta,
                                trace, method, W.shape[0] - m)


def _subset_lambda_max(V: np.ndarray) -> np.ndarray:
    """Top eigenvalue of ``sum_{i in X} u_i u_i^*`` for every subset ``X``."""
    m, d = V.shape
    outer = np.einsum("ia,ib->iab", V, V.conj())
    sums = np.zeros((1 << m, d, d), dtype=complex)
    for b in range(m):
        sums[1 << b:1 << (b + 1)] = sums[: 1 << b] + outer[b]
    return np.linalg.eigvalsh(sums)[:, -1]


def brute_force_partition(V, r: int, cap: int = config.BRUTE_FORCE_CAP) -> PartitionCertificate:
    """Exhaustive minimizer of the largest block Bessel bound."""
    V = as_vectors(V)
    m = V.shape[0]
    if r < 1:
        raise InvalidInput("r must be positive")
    if float(r) ** m > cap or m > config.SUBSET_UNIVERSE_CAP:
        raise BudgetExceeded(f"brute force needs {r}**{m} assignments, cap {cap}",
                             required=float(r) ** m, cap=cap)
    table = _subset_lambda_max(V)
    total = r ** m
    bits = np.int64(1) << np.arange(m, dtype=np.int64)
    best_val, best_code = math.inf, 0
    chunk = 100_000
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.empty((codes.size, m), dtype=np.int64)
        rest = codes.copy()
        for j in range(m - 1, -1, -1):
            digits[:, j] = rest % r
            rest //= r
        worst = np.zeros(codes.size)
        for k in range(r):
            worst = np.maximum(worst, table[((digits == k) * bits).sum(axis=1)])
        i = int(np.argmin(worst))
        if worst[i] < best_val:
            best_val, best_code = float(worst[i]), int(codes[i])
    assign = []
    for j in range(m):
        assign.append(best_code // r ** (m - 1 - j) % r)
    part = Partition(r, tuple(assign))
    delta = float(np.max(np.sum(np.abs(V) ** 2, axis=1)))
    return PartitionCertificate(part, block_bessel(V, part), weaver_bound(r, delta), delta,
                                [], "brute-force")
