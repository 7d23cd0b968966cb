"""Reproducible random instances for tests and the ``gen`` subcommand.

Every generator takes a ``numpy.random.Generator`` so that a single seed
drives a whole corpus.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInput
from .linalg import jacobi_eigh


def _complex_normal(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(_complex_normal(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))[None, :]


def parseval_frame(rng: np.random.Generator, d: int, m: int) -> np.ndarray:
    """``m`` rows in ``C^d`` from ``d`` orthonormal columns of a random unitary."""
    if not 1 <= d <= m:
        raise InvalidInput("a Parseval frame needs 1 <= d <= m")
    return random_unitary(rng, m)[:, :d]


def two_bases(rng: np.random.Generator, d: int) -> np.ndarray:
    """The standard basis and a random orthonormal basis of ``C^d``, both scaled by ``1/sqrt(2)``."""
    return np.vstack([np.eye(d), random_unitary(rng, d).T]) / math.sqrt(2.0)


def unit_bessel_system(rng: np.random.Generator, d: int, m: int) -> np.ndarray:
    """Random equal-norm system rescaled to Bessel bound exactly 1."""
    V = _complex_normal(rng, m, d)
    V /= np.linalg.norm(V, axis=1)[:, None]
    top = float(np.linalg.eigvalsh(V.T @ V.conj())[-1])
    return V / math.sqrt(top)


def unit_frame(rng: np.random.Generator, d: int, m: int) -> np.ndarray:
    V = _complex_normal(rng, m, d)
    return V / np.linalg.norm(V, axis=1)[:, None]


def riesz_system(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    if m > d:
        raise InvalidInput("a Riesz system in C^d has at most d vectors")
    return _complex_normal(rng, m, d)


def psd_tuple_summing_to_identity(rng: np.random.Generator, d: int, m: int) -> np.ndarray:
    """``m`` random PSD matrices (ranks 1 to ``d``) normalized so that they sum to ``I``."""
    for _ in range(1000):
        mats = []
        for _ in range(m):
            k = int(rng.integers(1, d + 1))
            X = _complex_normal(rng, d, k)
            mats.append(X @ X.conj().T)
        S = sum(mats)
        w, U = jacobi_eigh(S)
        # ranks summing below d leave S singular; draw again
        if np.min(w) > 1e-6 * np.max(w):
            break
    else:
        raise InvalidInput("could not draw an invertible sum")
    R = (U / np.sqrt(w)[None, :]) @ U.conj().T
    out = np.stack([R @ A @ R for A in mats])
    return 0.5 * (out + out.conj().transpose(0, 2, 1))


def rank_one_tuple(rng: np.random.Generator, d: int, m: int) -> np.ndarray:
    V = _complex_normal(rng, m, d)
    return np.einsum("ia,ib->iab", V, V.conj())


def rank_one_model(rng: np.random.Generator, d: int, m: int, values: int = 3):
    from .mixed import RandomRankOneModel
    vals, probs = [], []
    for _ in range(m):
        k = int(rng.integers(1, values + 1))
        vals.append(_complex_normal(rng, k, d))
        probs.append(rng.dirichlet(np.ones(k)))
    return RandomRankOneModel.build(vals, probs)


def zero_diagonal_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    A = _complex_normal(rng, d, d)
    H = 0.5 * (A + A.conj().T)
    H[np.diag_indices(d)] = 0.0
    return H


def half_projection(rng: np.random.Generator, n: int) -> np.ndarray:
    """Projection with every diagonal entry 1/2, as ``(I + R)/2`` for a zero-diagonal reflection."""
    if n < 2 or n % 2:
        raise InvalidInput("a diagonal-1/2 projection needs an even size")
    k = n // 2
    U = random_unitary(rng, k)
    R = np.block([[np.zeros((k, k)), U], [U.conj().T, np.zeros((k, k))]])
    perm = rng.permutation(n)
    D = np.diag(np.exp(2j * np.pi * rng.random(n)))
    R = D @ R[np.ix_(perm, perm)] @ D.conj()
    Q = 0.5 * (np.eye(n) + R)
    return 0.5 * (Q + Q.conj().T)


def small_diagonal_projection(rng: np.random.Generator, n: int, delta: float,
                              tries: int = 200) -> np.ndarray:
    """Random projection with every diagonal entry at most ``delta``.

    Starts from a harmonic projection (DFT columns on a random frequency
    set, so the diagonal is exactly ``k / n``), conjugates it by
    ``exp(i s H)`` for a random Hermitian ``H`` and keeps the first draw
    whose diagonal passes. The angle ``s`` shrinks towards zero over the
    tries, so the loop always ends when ``k / n <= delta``.
    """
    k = max(1, math.ceil(delta * n) - 1)
    if k / n > delta:
        raise InvalidInput(f"no rank-{k} projection on C^{n} has diagonal <= {delta:g}")
    F = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / math.sqrt(n)
    for t in range(tries):
        B = F[:, rng.choice(n, size=k, replace=False)]
        P = B @ B.conj().T
        A = _complex_normal(rng, n, n)
        w, U = np.linalg.eigh(0.5 * (A + A.conj().T))
        s = 0.3 * (1.0 - t / max(1, tries - 1))
        W = (U * np.exp(1j * s * w)[None, :]) @ U.conj().T
        P = W @ P @ W.conj().T
        P = 0.5 * (P + P.conj().T)
        if np.max(np.diag(P).real) <= delta + 1e-12:
            return P
    raise InvalidInput(f"no projection with diagonal <= {delta:g} found in {tries} tries")
