"""Dense complex Hermitian linear algebra at desk scale.

Matrices are plain ``numpy`` arrays of shape ``(d, d)``; vector systems are
arrays of shape ``(m, d)`` whose *rows* are the vectors ``u_i``. Inner
products are linear in the first slot, ``<x, y> = sum x_k conj(y_k)``.

The eigensolver is a cyclic complex Jacobi iteration written here rather
than a LAPACK call, so that ``char_poly`` (Faddeev-LeVerrier) and the
eigenvalues can be checked against each other without sharing code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import InvalidInput, NotPSD
from .poly import RealPolynomial


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray  # non-increasing
    residual: float


def as_square(A, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] == 0:
        raise InvalidInput(f"{name} has dimension zero")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def is_hermitian(A: np.ndarray, tol: float = config.HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= tol * max(1.0, np.max(np.abs(A))))


def as_hermitian(A, tol: float = config.HERMITIAN_TOL, name: str = "matrix") -> np.ndarray:
    """Validate ``A`` as Hermitian and return it exactly symmetrized."""
    A = as_square(A, name)
    if not is_hermitian(A, tol):
        raise InvalidInput(f"{name} is not Hermitian within {tol:g}")
    return 0.5 * (A + A.conj().T)


def as_vectors(V, name: str = "vector system") -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] < 1:
        raise InvalidInput(f"{name} must be a non-empty (m, d) array, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise InvalidInput(f"{name} has non-finite entries")
    return V


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    app = a[p, p].real
    aqq = a[q, q].real
    tau = (aqq - app) / (2.0 * r)
    if tau == 0.0:
        t = 1.0
    else:
        t = np.copysign(1.0, tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # U = E J with E = diag(.., e^{-i phi} at q, ..) and a real Jacobi rotation J
    cp = a[:, p].copy()
    cq = a[:, q] * np.conj(phase)
    a[:, p] = c * cp - s * cq
    a[:, q] = s * cp + c * cq
    rp = a[p, :].copy()
    rq = a[q, :] * phase
    a[p, :] = c * rp - s * rq
    a[q, :] = s * rp + c * rq
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    vp = v[:, p].copy()
    vq = v[:, q] * np.conj(phase)
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def jacobi_eigh(A, tol: float = config.JACOBI_REL_TOL,
                max_sweeps: int = config.JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, V)`` with ``w`` non-increasing and ``A V = V diag(w)``.
    Sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||A||_F``.
    """
    a = as_hermitian(A).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale > 0.0 and n > 1:
        for _ in range(max_sweeps):
            off = np.linalg.norm(a - np.diag(np.diag(a)))
            if off <= tol * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(a[p, q]) > 1e-300:
                        _rotate(a, v, p, q)
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigh(A) -> tuple[np.ndarray, np.ndarray]:
    return jacobi_eigh(A)


def eigenvalues(A) -> SpectrumReport:
    A = as_hermitian(A)
    w, V = jacobi_eigh(A)
    resid = np.linalg.norm(A @ V - V * w, axis=0)
    return SpectrumReport(eigenvalues=w, residual=float(np.max(resid)))


def operator_norm(A) -> float:
    """Largest singular value; equals max |eigenvalue| for Hermitian input."""
    A = as_square(A)
    if is_hermitian(A):
        w, _ = jacobi_eigh(A)
        return float(max(abs(w[0]), abs(w[-1])))
    w, _ = jacobi_eigh(A.conj().T @ A)
    return float(np.sqrt(max(w[0], 0.0)))


def psd_sqrt(A, tol: float = config.PSD_TOL) -> np.ndarray:
    w, V = jacobi_eigh(A)
    if w[-1] < -tol:
        raise NotPSD(f"matrix has eigenvalue {w[-1]:.3e} below -{tol:g}")
    w = np.clip(w, 0.0, None)
    B = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (B + B.conj().T)


def check_psd(A, tol: float = config.PSD_TOL, name: str = "matrix") -> np.ndarray:
    A = as_hermitian(A, name=name)
    w, _ = jacobi_eigh(A)
    if w[-1] < -tol:
        raise NotPSD(f"{name} has eigenvalue {w[-1]:.3e} below -{tol:g}")
    return A


def faddeev_leverrier(A: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients of a batch of square matrices.

    ``A`` has shape ``(..., n, n)``; returns real ascending coefficients of
    ``det(zI - A)`` with shape ``(..., n + 1)``.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[-1]
    batch = A.shape[:-2]
    coeffs = np.zeros(batch + (n + 1,), dtype=complex)
    coeffs[..., n] = 1.0
    eye = np.eye(n, dtype=complex)
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[..., n - k + 1, None, None] * eye
        coeffs[..., n - k] = -np.trace(A @ M, axis1=-2, axis2=-1) / k
    return coeffs.real


def char_poly(A) -> RealPolynomial:
    A = as_hermitian(A)
    return RealPolynomial(faddeev_leverrier(A), monic=True)


def frame_operator(V) -> np.ndarray:
    """``sum_i u_i u_i^*`` for the rows ``u_i`` of ``V``."""
    V = as_vectors(V)
    S = V.T @ V.conj()
    return 0.5 * (S + S.conj().T)


def gram_matrix(V) -> np.ndarray:
    """``G[i, j] = <u_j, u_i>``."""
    V = as_vectors(V)
    G = V.conj() @ V.T
    return 0.5 * (G + G.conj().T)


def lambda_max(A) -> float:
    return float(jacobi_eigh(A)[0][0])


def lambda_min(A) -> float:
    return float(jacobi_eigh(A)[0][-1])


def span_coordinates(V, tol: float = 1e-10) -> np.ndarray:
    """Coordinates of the rows of ``V`` in an orthonormal basis of their span.

    The returned system has the same Gram matrix as ``V`` and lives in
    dimension ``rank(V)`` (at least 1).
    """
    V = as_vectors(V)
    w, U = jacobi_eigh(frame_operator(V))
    keep = w > tol * max(1.0, w[0])
    if not np.any(keep):
        keep[0] = True
    basis = U[:, keep]
    return V @ basis.conj()


def range_basis(P, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (as columns) of the range of a PSD matrix."""
    w, U = jacobi_eigh(P)
    return U[:, w > tol]
