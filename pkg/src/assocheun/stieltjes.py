"""Stieltjes transform of the associated Stieltjes-Carlitz orthogonality measure.

Rates of the first family::

    lam_n = k2 (2n + 2c + 1)^2,    mu_n = 4 (n + c)^2 + mu * [n == 0]

Two independent routes to ``S(z) = int dPsi(x) / (z - x)``:

* ``stieltjes_S`` -- the closed ratio ``-D(c+1, 0; z) / D(c, mu; z)`` of
  elliptic cosine integrals (valid for ``c > 1/2``),
* ``cf_markov`` -- the Jacobi continued fraction of the three-term
  recurrence, evaluated by backward recurrence.

``moments_jacobi`` gives the power moments from the tridiagonal operator,
for Laurent-series checks at large ``|z|``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .elliptic import complete_K, sn_power_integrand
from .quadrature import integrate_power_weight

QUAD_TOL = 1e-12
CF_TOL = 1e-12
CF_MAX_DEPTH = 1 << 22


class SpectralDomainError(ValueError):
    pass


class ContinuedFractionError(RuntimeError):
    def __init__(self, message: str, result: "SpectralResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class SCRates:
    c: float
    mu: float
    k2: float

    def __post_init__(self):
        if self.c < 0:
            raise SpectralDomainError(f"c={self.c} must be >= 0")
        if self.mu < 0:
            raise SpectralDomainError(f"mu={self.mu} must be >= 0")
        if not (0.0 < self.k2 < 1.0):
            raise SpectralDomainError(f"k2={self.k2} outside (0, 1)")

    def lam(self, n):
        return self.k2 * (2.0 * np.asarray(n) + 2.0 * self.c + 1.0) ** 2

    def mu_n(self, n):
        n = np.asarray(n)
        return 4.0 * (n + self.c) ** 2 + np.where(n == 0, self.mu, 0.0)


@dataclass(frozen=True)
class SpectralResult:
    z: complex
    value: complex
    method: str
    err_estimate: float
    pole: bool = False


def _check_z(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise SpectralDomainError(f"z={z} lies on the support [0, inf)")
    return z


def _root(z: complex) -> complex:
    """``sqrt(z)`` with non-negative imaginary part (``cos`` is even, so either sign works)."""
    s = cmath.sqrt(z)
    return -s if s.imag < 0 else s


def _cos_ratio(u: np.ndarray, s: complex, K: float) -> np.ndarray:
    """``cos(s (K - u)) / cos(s K)`` written with decaying exponentials (Im s >= 0)."""
    return (np.exp(1j * s * u) + np.exp(1j * s * (2.0 * K - u))) / (1.0 + np.exp(2j * s * K))


def _d_terms(c: float, mu: float):
    g = math.exp(gammaln(2.0 * c + 1.0))
    # 2c(2c-1) (sn^2)^(c-1) dn + mu (sn^2)^c dn, over Gamma(2c+1); the first term
    # vanishes identically at c = 1/2
    a = 0.0 if c == 0.5 else 2.0 * c * (2.0 * c - 1.0) / g
    return [(a, c - 1.0, 0, 1), (mu / g, c, 0, 1)]


def _weighted_cos_integral(terms, z: complex, k2: float, tol: float) -> tuple[complex, float]:
    """``int_0^K cos(sqrt z (K-u))/cos(sqrt z K) * sum(terms) du`` and its error estimate."""
    K = complete_K(k2)
    s = _root(z)
    p, g = sn_power_integrand(terms, k2)
    if p <= -1.0:
        raise SpectralDomainError("integrand not integrable at u = 0 (needs c > 1/2)")
    re = integrate_power_weight(lambda u: np.real(_cos_ratio(u, s, K) * g(u)), 0.0, K, p, tol=tol)
    im = integrate_power_weight(lambda u: np.imag(_cos_ratio(u, s, K) * g(u)), 0.0, K, p, tol=tol)
    return complex(re.value, im.value), math.hypot(re.abs_error_estimate, im.abs_error_estimate)


def _cos_sK(z: complex, k2: float) -> complex:
    return cmath.cos(_root(z) * complete_K(k2))


def d_integral(c: float, mu: float, z: complex, k2: float, tol: float = QUAD_TOL) -> complex:
    """``D(c, mu; z) = int_0^K cos(sqrt z (K-u)) (2c(2c-1) + mu sn^2 u) dn u (sn^2 u)^(c-1) du / Gamma(2c+1)``.

    Requires ``c >= 1/2``. Large ``|z|`` may overflow; ratios should use
    :func:`stieltjes_S`, which divides out ``cos(sqrt z K)`` first.
    """
    if c < 0.5:
        raise SpectralDomainError(f"d_integral needs c >= 1/2, got c={c}")
    z = _check_z(z)
    val, _ = _weighted_cos_integral(_d_terms(c, mu), z, k2, tol)
    return val * _cos_sK(z, k2)


def numerator_direct(c: float, z: complex, k2: float, tol: float = QUAD_TOL) -> complex:
    """``int_0^K cos(sqrt z (K-u)) dn u (sn^2 u)^c du / Gamma(2c+1)``; equals ``D(c+1, 0; z)``."""
    z = _check_z(z)
    g = math.exp(gammaln(2.0 * c + 1.0))
    val, _ = _weighted_cos_integral([(1.0 / g, c, 0, 1)], z, k2, tol)
    return val * _cos_sK(z, k2)


def stieltjes_S(r: SCRates, z: complex, tol: float = QUAD_TOL) -> SpectralResult:
    """``S(z) = -D(c+1, 0; z) / D(c, mu; z)`` (``c > 1/2``; ``c = 1/2`` needs ``mu > 0``)."""
    if r.c < 0.5:
        raise SpectralDomainError(f"the D-ratio needs c > 1/2, got c={r.c}")
    z = _check_z(z)
    num, enum = _weighted_cos_integral(_d_terms(r.c + 1.0, 0.0), z, r.k2, tol)
    den, eden = _weighted_cos_integral(_d_terms(r.c, r.mu), z, r.k2, tol)
    if abs(den) <= eden:
        return SpectralResult(z, complex(math.inf), "d_ratio", math.inf, pole=True)
    value = -num / den
    err = abs(value) * (enum / max(abs(num), 1e-300) + eden / abs(den))
    return SpectralResult(z, value, "d_ratio", err)


def _cf_backward(z: complex, a: np.ndarray, b2: np.ndarray) -> complex:
    f = 0.0
    for n in range(a.size - 1, 0, -1):
        f = b2[n] / (z - a[n] - f)
    return 1.0 / (z - a[0] - f)


def cf_markov(r: SCRates, z: complex, tol: float = CF_TOL,
              max_depth: int = CF_MAX_DEPTH) -> SpectralResult:
    """``1/(z - a0 - b1^2/(z - a1 - b2^2/(...)))`` with ``a_n = lam_n + mu_n``, ``b_n^2 = lam_{n-1} mu_n``.

    Depth doubles from 16 until two successive truncations agree to ``tol``
    (relative).
    """
    z = _check_z(z)
    depth = 16
    prev = None
    while True:
        n = np.arange(depth + 1)
        a = r.lam(n) + r.mu_n(n)
        b2 = np.zeros(depth + 1)
        b2[1:] = r.lam(n[:-1]) * r.mu_n(n[1:])
        val = _cf_backward(z, a, b2)
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * abs(val):
                return SpectralResult(z, val, "continued_fraction", err)
        if depth >= max_depth:
            res = SpectralResult(z, val, "continued_fraction",
                                 abs(val - prev) if prev is not None else math.inf)
            raise ContinuedFractionError(
                f"continued fraction not converged at depth {depth}", res)
        prev = val
        depth *= 2


def moments_jacobi(r: SCRates, n_max: int) -> np.ndarray:
    """Power moments ``m_j = (e0, T^j e0)``, ``j = 0..n_max``, of the Jacobi operator."""
    if n_max > 12:
        raise ValueError("n_max above 12 is numerically meaningless here")
    size = n_max + 1
    n = np.arange(size)
    diag = r.lam(n) + r.mu_n(n)
    off = np.sqrt(r.lam(n[:-1]) * r.mu_n(n[1:]))
    T = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    v = np.zeros(size)
    v[0] = 1.0
    m = np.empty(size)
    for j in range(size):
        m[j] = v[0]
        v = T @ v
    return m


def laurent_tail(moments: np.ndarray, p: float, J: int) -> float:
    """``sum_{j<=J} (-1)^j m_j / p^(j+1)``, the large-``p`` expansion of ``-S(-p)``."""
    return float(sum((-1) ** j * moments[j] / p ** (j + 1) for j in range(J + 1)))
