"""Real univariate polynomials: Sturm counting, real-rootedness, max root.

Coefficients are stored in ascending order. The zero threshold used for
trimming is relative to the largest coefficient, because the mixed
characteristic polynomials handled here span many orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config
from .errors import IllConditioned, InvalidInput, NotRealRooted

_EPS = np.finfo(float).eps


def _trim(c: np.ndarray, rel: float = config.COEFF_ZERO_REL) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    big = np.max(np.abs(c))
    if big == 0.0:
        return np.zeros(1)
    nz = np.nonzero(np.abs(c) > rel * big)[0]
    return c[: nz[-1] + 1].copy()


class RealPolynomial:
    """Polynomial with real coefficients, ``coeffs[j]`` multiplying ``z**j``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, monic: bool = False):
        c = np.asarray(coeffs)
        if np.iscomplexobj(c):
            if np.max(np.abs(c.imag), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(c.real), initial=0.0)):
                raise InvalidInput("polynomial has non-real coefficients")
            c = c.real
        if monic:
            # the leading 1 is kept even when it is tiny relative to the rest
            c = np.asarray(c, dtype=float).copy()
            nz = np.nonzero(c)[0]
            c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        else:
            c = _trim(c)
        if not np.all(np.isfinite(c)):
            raise InvalidInput("polynomial has non-finite coefficients")
        if monic and abs(c[-1] - 1.0) > 1e-10:
            raise InvalidInput(f"expected a monic polynomial, leading coefficient is {c[-1]!r}")
        self.coeffs = c

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0.0:
            return 0
        return self.coeffs.size - 1

    @property
    def lead(self) -> float:
        return float(self.coeffs[-1])

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def __add__(self, other: RealPolynomial) -> RealPolynomial:
        n = max(self.coeffs.size, other.coeffs.size)
        out = np.zeros(n)
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return RealPolynomial(out)

    def __sub__(self, other: RealPolynomial) -> RealPolynomial:
        return self + other * -1.0

    def __mul__(self, other) -> RealPolynomial:
        if isinstance(other, RealPolynomial):
            return RealPolynomial(np.convolve(self.coeffs, other.coeffs))
        return RealPolynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"RealPolynomial({self.coeffs.tolist()!r})"

    def allclose(self, other: RealPolynomial, rel: float = 1e-8) -> bool:
        return coefficient_error(self, other) <= rel

    def to_dict(self) -> dict:
        return {"coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> RealPolynomial:
        try:
            return cls(np.asarray(data["coeffs"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad polynomial JSON: {exc}") from exc


def coefficient_error(p: RealPolynomial, q: RealPolynomial) -> float:
    """Max coefficient difference relative to the largest coefficient."""
    n = max(p.coeffs.size, q.coeffs.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: p.coeffs.size] = p.coeffs
    b[: q.coeffs.size] = q.coeffs
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def differentiate(p: RealPolynomial) -> RealPolynomial:
    if p.degree == 0:
        return RealPolynomial([0.0])
    return RealPolynomial(np.polynomial.polynomial.polyder(p.coeffs))


def cauchy_bound(p: RealPolynomial) -> float:
    c = p.coeffs
    if p.degree == 0:
        return 1.0
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1])))


def _normalized(c: np.ndarray) -> np.ndarray:
    return c / np.max(np.abs(c))


def _rem(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray | None:
    """Remainder of ascending ``a`` by ``b``; ``None`` when it is negligible."""
    _, r = np.polydiv(a[::-1], b[::-1])
    r = np.atleast_1d(r)[::-1]
    if np.max(np.abs(r)) <= tol * np.max(np.abs(a)):
        return None
    return _trim(r, tol)


def poly_gcd(p: RealPolynomial, q: RealPolynomial, tol: float = config.GCD_REL_TOL) -> RealPolynomial:
    """Euclid on normalized remainders; remainders below ``tol`` count as zero."""
    a = _normalized(p.coeffs)
    b = _normalized(q.coeffs)
    if b.size > a.size:
        a, b = b, a
    while b.size > 1:
        r = _rem(a, b, tol)
        if r is None:
            return RealPolynomial(b / b[-1])
        a, b = b, _normalized(r)
    return RealPolynomial([1.0])


def square_free_part(p: RealPolynomial, tol: float = config.GCD_REL_TOL) -> RealPolynomial:
    if p.degree <= 1:
        return p
    g = poly_gcd(p, differentiate(p), tol)
    if g.degree == 0:
        return p
    quot, _ = np.polydiv(p.coeffs[::-1], g.coeffs[::-1])
    return RealPolynomial(np.atleast_1d(quot)[::-1])


def _sturm_chain(p: RealPolynomial, tol: float) -> list[np.ndarray]:
    chain = [_normalized(p.coeffs)]
    if p.degree == 0:
        return chain
    chain.append(_normalized(differentiate(p).coeffs))
    while chain[-1].size > 1:
        r = _rem(chain[-2], chain[-1], tol)
        if r is None:
            break
        chain.append(-_normalized(r))
        if not np.all(np.isfinite(chain[-1])):
            raise ArithmeticError("Sturm chain degenerated")
    return chain


def _variations(chain: list[np.ndarray], x: float) -> int:
    vals = [np.polynomial.polynomial.polyval(x, c) for c in chain]
    signs = [np.sign(v) for v in vals if v != 0.0]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def sturm_real_root_count(p: RealPolynomial, lo: float, hi: float,
                          tol: float = config.GCD_REL_TOL) -> int:
    """Number of distinct real roots of ``p`` in ``(lo, hi]``."""
    if not lo < hi:
        raise InvalidInput("need lo < hi")
    if p.is_zero:
        raise InvalidInput("zero polynomial has infinitely many roots")
    if p.degree == 0:
        return 0
    scale = max(abs(lo), abs(hi), 1.0)
    mag = np.max(np.abs(p.coeffs))
    thresh = 1e-12 * mag
    for _ in range(8):
        if abs(p(lo)) >= thresh:
            break
        lo -= 1e-9 * scale
    for _ in range(8):
        if abs(p(hi)) >= thresh:
            break
        hi += 1e-9 * scale
    chain = _sturm_chain(p, tol)
    return _variations(chain, lo) - _variations(chain, hi)


@dataclass(frozen=True)
class RootednessVerdict:
    status: str  # "real-rooted" | "not-real-rooted" | "inconclusive"
    real_root_count: int
    degree: int
    witness: tuple[float, float] | None = None

    @property
    def real_rooted(self) -> bool:
        return self.status == "real-rooted"


def _strip_zero_roots(p: RealPolynomial) -> tuple[RealPolynomial, int]:
    c = p.coeffs.copy()
    big = np.max(np.abs(c))
    k = 0
    while k < c.size - 1 and abs(c[k]) <= config.COEFF_ZERO_REL * big:
        k += 1
    return RealPolynomial(c[k:]), k


def is_real_rooted(p: RealPolynomial) -> RootednessVerdict:
    """Tri-state real-rootedness certificate.

    Roots at zero (coefficients below the zero threshold) are split off
    first, then multiplicities are removed with a floating point GCD before
    counting distinct roots of the square-free part with a Sturm chain over
    a Cauchy-bound interval. A count short of the degree only yields
    ``not-real-rooted`` when the companion eigenvalues show a clearly
    non-real pair; near-multiple roots give ``inconclusive``.
    """
    if p.is_zero:
        return RootednessVerdict("inconclusive", 0, 0)
    q, _ = _strip_zero_roots(p)
    if q.degree == 0:
        return RootednessVerdict("real-rooted", 0, 0)
    bound = cauchy_bound(q) * (1.0 + 1e-6)
    witness = (-bound, bound)
    best = None
    for tol in (config.GCD_REL_TOL, 1e-9, 1e-7):
        try:
            sf = square_free_part(q, tol)
            count = sturm_real_root_count(sf, -bound, bound, tol)
        except ArithmeticError:
            continue
        if count == sf.degree:
            return RootednessVerdict("real-rooted", count, sf.degree, witness)
        if best is None:
            best = (count, sf.degree)
    roots = np.roots(q.coeffs[::-1])
    spread = 1.0 + np.max(np.abs(roots))
    count, deg = best if best is not None else (0, q.degree)
    if np.max(np.abs(roots.imag)) > 1e-6 * spread:
        return RootednessVerdict("not-real-rooted", count, deg, witness)
    return RootednessVerdict("inconclusive", count, deg, witness)


def _horner(c: list[float], x: float) -> float:
    v = 0.0
    for a in reversed(c):
        v = v * x + a
    return v


def _noise(c: list[float], x: float) -> float:
    """Rounding bound for Horner evaluation of ``c`` at ``x``."""
    ax = abs(x)
    v = 0.0
    for a in reversed(c):
        v = v * ax + abs(a)
    return 2.0 * _EPS * len(c) * v


def _derivatives(c: list[float]) -> list[list[float]]:
    out = [c]
    while len(out[-1]) > 1:
        d = out[-1]
        out.append([k * d[k] for k in range(1, len(d))])
    return out


def _above_roots(derivs: list[list[float]], x: float) -> bool:
    """Budan-Fourier test: no sign change in ``(p, p', p'', ...)`` at ``x``."""
    for c in derivs:
        if _horner(c, x) < -_noise(c, x):
            return False
    return True


def _upper_bound(c: list[float]) -> float:
    """min of the Cauchy and Fujiwara bounds for a monic ``c``."""
    n = len(c) - 1
    cauchy = 1.0 + max(abs(a) for a in c[:-1])
    fuji = 2.0 * max(abs(c[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    return min(cauchy, fuji)


def maxroot(p: RealPolynomial, max_iter: int = config.NEWTON_MAX_ITER,
            rel_stop: float = config.NEWTON_REL_STOP) -> float:
    """Largest root of a real-rooted polynomial with positive leading coefficient.

    Newton's method from an upper root bound decreases monotonically for
    real-rooted input. A multiplicity estimate ``p'^2 / (p'^2 - p p'')``
    accelerates clustered top roots; an accelerated step is only taken when
    the Budan-Fourier sign test confirms it stays above every root. An
    iterate that leaves that region raises :class:`NotRealRooted`.
    """
    return maxroot_with_error(p, max_iter, rel_stop)[0]


def maxroot_with_error(p: RealPolynomial, max_iter: int = config.NEWTON_MAX_ITER,
                       rel_stop: float = config.NEWTON_REL_STOP) -> tuple[float, float]:
    """``maxroot`` plus a first-order bound on its rounding error.

    The bound comes from the Horner rounding noise at the returned point,
    scaled through the local Taylor coefficients. Inside a tight cluster it
    also covers the gap to the last iterate known to lie above every root.
    """
    if p.degree == 0:
        raise InvalidInput("constant polynomial has no roots")
    if p.lead <= 0.0:
        raise InvalidInput("maxroot needs a positive leading coefficient")
    c = p.coeffs / p.lead
    nz = np.nonzero(c)[0]
    zero_root = nz[0] > 0
    c = [float(a) for a in c[nz[0]:]]  # split off exact roots at zero
    if len(c) == 1:
        return 0.0, 0.0
    if not all(math.isfinite(a) for a in c):
        raise IllConditioned("non-finite coefficients")
    derivs = _derivatives(c)
    try:
        x, err = _maxroot_newton(derivs, max_iter, rel_stop)
    except OverflowError as exc:
        raise IllConditioned(f"polynomial overflows: {exc}") from exc
    if zero_root and x < 0.0:
        return 0.0, 0.0
    return x, err


def _root_error(derivs: list[list[float]], x: float) -> float:
    """Distance bound from ``x`` to the nearest root given the rounding noise at ``x``.

    With ``a_k = p^(k)(x) / k!`` some root lies within
    ``(C(n, k) |a_0| / |a_k|) ** (1/k)`` of ``x`` for every ``k``; ``|a_0|``
    is replaced by the noise level since the residual is below it.
    """
    n = len(derivs[0]) - 1
    noise = _noise(derivs[0], x)
    best = math.inf
    for k, c in enumerate(derivs[1:], start=1):
        a = abs(_horner(c, x)) / math.factorial(k)
        if a > 0.0:
            best = min(best, (math.comb(n, k) * noise / a) ** (1.0 / k))
    return best


def _simple_newton(c: list[float], dc: list[float], x: float) -> float:
    """Plain Newton from above a root; a step that overshoots past rounding noise is refused."""
    for _ in range(100):
        v = _horner(c, x)
        dv = _horner(dc, x)
        if v <= _noise(c, x) or dv <= 0.0:
            break
        y = x - v / dv
        if _horner(c, y) < -_noise(c, y):
            break
        if x - y < 1e-15 * (1.0 + abs(y)):
            x = y
            break
        x = y
    return x


def _polish(derivs: list[list[float]], x: float) -> tuple[float, float]:
    """Sharpen a top root reached only to rounding-noise level.

    Near a ``k``-fold root an expanded polynomial pins the root down to about
    ``eps**(1/k)``. The derivative ``p^(k-1)`` has a simple root there and no
    root above the top root of ``p``. Newton is run on ``p', p'', ...`` from
    ``x``; the highest derivative whose root still zeroes ``p`` to rounding
    accuracy gives the answer. Since ``x`` sits above the cluster, the error
    bound also covers the distance walked down from it.
    """
    c = derivs[0]
    deg = len(c) - 1
    best = _simple_newton(c, derivs[1], x)
    for j in range(1, min(deg, 9)):
        cand = _simple_newton(derivs[j], derivs[j + 1], x)
        if cand > x or abs(_horner(c, cand)) > _noise(c, cand):
            break
        best = cand
    return best, max(_root_error(derivs, best), x - best)


def _maxroot_newton(derivs: list[list[float]], max_iter: int,
                    rel_stop: float) -> tuple[float, float]:
    c = derivs[0]
    deg = len(c) - 1
    d1 = derivs[1]
    d2 = derivs[2] if deg >= 2 else [0.0]
    x = _upper_bound(c)
    step = 0.0
    for _ in range(max_iter):
        px = _horner(c, x)
        noise = _noise(c, x)
        if px <= noise:
            if px < -noise:
                raise NotRealRooted(f"Newton iterate {x!r} crossed a root")
            return _polish(derivs, x)
        dpx = _horner(d1, x)
        if dpx <= 0.0:
            raise NotRealRooted(f"non-monotone Newton step at {x!r}")
        step = px / dpx
        if step < rel_stop * (1.0 + abs(x)):
            return x - step, _root_error(derivs, x - step)
        ddpx = _horner(d2, x)
        den = dpx * dpx - px * ddpx
        if den > 0.0:
            k = min(float(deg), dpx * dpx / den)
            if k > 1.5:
                trial = x - math.floor(k + 0.5) * step
                if _above_roots(derivs, trial):
                    x = trial
                    continue
        x = x - step
    lo, hi = x - deg * step, x
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _above_roots(derivs, mid):
            hi = mid
        else:
            lo = mid
    return hi, max(_root_error(derivs, hi), hi - lo)


def convex_combination(ps: Sequence[RealPolynomial], ts: Sequence[float]) -> RealPolynomial:
    ts = np.asarray(ts, dtype=float)
    if len(ps) != ts.size or len(ps) == 0:
        raise InvalidInput("need one weight per polynomial")
    if np.any(ts < 0.0) or abs(ts.sum() - 1.0) > 1e-12:
        raise InvalidInput("weights must be non-negative and sum to 1")
    degs = {p.degree for p in ps}
    if len(degs) != 1:
        raise InvalidInput(f"mismatched degrees {sorted(degs)}")
    n = degs.pop() + 1
    out = np.zeros(n)
    for p, t in zip(ps, ts):
        out[: p.coeffs.size] += t * p.coeffs
    return RealPolynomial(out)
