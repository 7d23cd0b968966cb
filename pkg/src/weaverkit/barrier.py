"""Barrier functions of ``p(z) = det(sum_i z_i A_i)`` and the root bound certificate.

Above the roots (``sum x_i A_i`` positive definite) the barrier in
direction ``j`` is ``tr((sum x_i A_i)^{-1} A_j)`` by Jacobi's formula, so
everything here reduces to linear solves with the pencil.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import config
from .errors import InternalError, InvalidInput, SingularPoint
from .linalg import operator_norm
from .mixed import MatrixTuple, matrix_tuple, mixed_char_poly
from .poly import is_real_rooted, maxroot


def _tuple(T) -> MatrixTuple:
    return T if isinstance(T, MatrixTuple) else matrix_tuple(T)


def _pencil(T: MatrixTuple, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != T.count or not np.all(np.isfinite(x)):
        raise InvalidInput(f"point must have {T.count} finite coordinates")
    M = np.tensordot(x, T.mats, axes=1)
    return 0.5 * (M + M.conj().T)


def _inverse_above_roots(M: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(M)
    if w[0] <= 1e-12 * max(1.0, abs(w[-1])):
        raise SingularPoint(f"pencil is not positive definite here (min eigenvalue {w[0]:.3e})")
    return np.linalg.inv(M)


def barrier_value(T, x, j: int) -> float:
    """``d/dz_j log det(sum z_i A_i)`` at a point above the roots."""
    T = _tuple(T)
    Minv = _inverse_above_roots(_pencil(T, x))
    return float(np.trace(Minv @ T.mats[j]).real)


def barrier_on_diagonal(T, j: int, t: float) -> float:
    if not t > 0.0:
        raise InvalidInput("t must be positive")
    T = _tuple(T)
    if not 0 <= j < T.count:
        raise InvalidInput(f"index {j} out of range")
    return barrier_value(T, np.full(T.count, float(t)), j)


def barrier_gradient(T, x, j: int) -> np.ndarray:
    """``d/dz_i`` of the ``j`` barrier for every ``i``: ``-tr(M^-1 A_i M^-1 A_j)``."""
    T = _tuple(T)
    Minv = _inverse_above_roots(_pencil(T, x))
    B = Minv @ T.mats[j] @ Minv
    return -np.einsum("iab,ba->i", T.mats, B).real


def shifted_barrier(T, x, i: int, j: int) -> float:
    """Barrier ``i`` of ``(1 - d/dz_j) p`` at ``x``, from ``p (1 - Phi^j)``."""
    phi_j = barrier_value(T, x, j)
    if phi_j >= 1.0:
        raise SingularPoint("the j barrier is at least 1, so (1 - d_j)p vanishes or changes sign")
    return barrier_value(T, x, i) - barrier_gradient(T, x, j)[i] / (1.0 - phi_j)


@dataclass(frozen=True)
class McpCertificate:
    epsilon: float
    t_star: float
    delta_star: float
    claimed_bound: float
    achieved_maxroot: float
    rootedness: str = "real-rooted"

    @property
    def ok(self) -> bool:
        return self.achieved_maxroot <= self.claimed_bound + config.CERT_SLACK

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ok"] = self.ok
        return out


def mcp_certificate(T, strict: bool = True, budget: int = config.POLARIZATION_BUDGET) -> McpCertificate:
    """Check ``maxroot mu[A_1..A_m] <= (1 + sqrt(eps))**2`` for ``sum A_i = I``.

    With ``strict`` a violated bound raises :class:`InternalError`, since the
    inequality is a theorem and a violation means a numerical bug.
    """
    T = _tuple(T)
    if operator_norm(T.total() - np.eye(T.dim)) > 1e-8:
        raise InvalidInput("the matrices must sum to the identity")
    eps = float(np.max(T.traces()))
    mu = mixed_char_poly(T, budget=budget)
    verdict = is_real_rooted(mu)
    root = maxroot(mu)
    s = math.sqrt(eps)
    cert = McpCertificate(epsilon=eps, t_star=s + eps, delta_star=1.0 + s,
                          claimed_bound=(1.0 + s) ** 2, achieved_maxroot=root,
                          rootedness=verdict.status)
    if strict and not cert.ok:
        raise InternalError(f"maxroot {root!r} exceeds the proven bound {cert.claimed_bound!r}")
    return cert


@dataclass
class BarrierReport:
    samples: int = 0
    skipped: list = field(default_factory=list)
    min_value: float = math.inf
    max_increase: float = -math.inf
    min_second_difference: float = math.inf
    shift_checks: int = 0
    shift_violations: int = 0
    max_shift_formula_error: float = 0.0

    @property
    def ok(self) -> bool:
        return (self.min_value >= -config.CERT_SLACK and self.max_increase <= config.CERT_SLACK
                and self.min_second_difference >= -config.CERT_SLACK and self.shift_violations == 0)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ok"] = self.ok
        return out


def barrier_shift_check(T, samples: int = 8, seed: int = 0, h: float = 0.25) -> BarrierReport:
    """Sample non-negativity, monotonicity and convexity of the barriers.

    Base points are the diagonal points ``t * (1, ..., 1)`` for ``t`` at and
    above ``sqrt(eps) + eps`` plus random positive perturbations of them.
    Along each coordinate ``e_j`` the barriers are evaluated at shifts
    ``0, h, 2h`` for first and second differences. Where the hypothesis
    ``Phi^j <= 1 - 1/delta`` holds with ``delta = 1 + sqrt(eps)``, the shifted
    barrier of ``(1 - d_j) p`` at ``x + delta e_j`` is compared with the
    barrier of ``p`` at ``x``; the closed form is also cross-checked against
    a central difference of ``log((1 - d_j) p)``.
    """
    T = _tuple(T)
    if operator_norm(T.total() - np.eye(T.dim)) > 1e-8:
        raise InvalidInput("the matrices must sum to the identity")
    m = T.count
    eps = float(np.max(T.traces()))
    delta = 1.0 + math.sqrt(eps)
    t0 = math.sqrt(eps) + eps
    rng = np.random.default_rng(seed)
    rep = BarrierReport()
    for s in range(samples):
        x = np.full(m, t0 * (1.0 + 0.5 * s))
        if s % 2 == 1:
            x = x + rng.uniform(0.0, 0.5, size=m)
        for j in range(m):
            try:
                vals = np.array([[barrier_value(T, x + k * h * np.eye(m)[j], i) for i in range(m)]
                                 for k in range(3)])
            except SingularPoint as exc:
                rep.skipped.append(f"sample {s}, direction {j}: {exc}")
                continue
            rep.samples += 1
            rep.min_value = min(rep.min_value, float(vals.min()))
            rep.max_increase = max(rep.max_increase, float(np.max(vals[1:] - vals[:-1])))
            rep.min_second_difference = min(rep.min_second_difference,
                                             float(np.min(vals[2] - 2 * vals[1] + vals[0])))
            if vals[0, j] > 1.0 - 1.0 / delta:
                continue
            y = x + delta * np.eye(m)[j]
            for i in range(m):
                shifted = shifted_barrier(T, y, i, j)
                rep.shift_checks += 1
                if shifted > vals[0, i] + config.CERT_SLACK:
                    rep.shift_violations += 1
                step = 1e-5 * (1.0 + abs(y[i]))
                e = np.eye(m)[i] * step
                g = [math.log(_det_pencil(T, y + k * e) * (1.0 - barrier_value(T, y + k * e, j)))
                     for k in (-1, 1)]
                fd = (g[1] - g[0]) / (2 * step)
                rep.max_shift_formula_error = float(max(rep.max_shift_formula_error,
                                                  abs(fd - shifted) / (1.0 + abs(shifted))))
    return rep


def _det_pencil(T: MatrixTuple, x) -> float:
    sign, logdet = np.linalg.slogdet(_pencil(T, x))
    return float(sign.real * math.exp(logdet))
