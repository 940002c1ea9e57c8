"""Jacobi elliptic functions of real argument and parameter ``k2 = k**2``.

Conventions follow Whittaker and Watson: ``sn(u; k2)`` inverts
``u = int_0^sn dt / sqrt((1 - t^2)(1 - k2 t^2))``. Only the real branch with
``0 <= k2 < 1`` is provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .quadrature import integrate

_EPS = np.finfo(float).eps


class EllipticDomainError(ValueError):
    pass


def _check_k2(k2: float) -> None:
    if not (0.0 <= k2 < 1.0):
        raise EllipticDomainError(f"parameter k2={k2} outside [0, 1)")


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    for _ in range(64):
        if abs(a - b) <= 2 * _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


@lru_cache(maxsize=256)
def complete_K(k2: float) -> float:
    """Complete elliptic integral of the first kind, ``K(k2) = pi / (2 agm(1, k'))``."""
    _check_k2(k2)
    if k2 == 0.0:
        return 0.5 * math.pi
    return 0.5 * math.pi / agm(1.0, math.sqrt(1.0 - k2))


@lru_cache(maxsize=256)
def _landen_sequence(k2: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    a, b, c = 1.0, math.sqrt(1.0 - k2), math.sqrt(k2)
    avals, cvals = [a], [c]
    while abs(c) > _EPS * a and len(avals) < 64:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        avals.append(a)
        cvals.append(c)
    return tuple(avals), tuple(cvals)


@dataclass(frozen=True)
class Modulus:
    """Elliptic parameter ``k2`` together with its quarter period ``K``."""

    k2: float
    K: float = field(init=False)

    def __post_init__(self):
        _check_k2(self.k2)
        object.__setattr__(self, "K", complete_K(self.k2))


@dataclass(frozen=True)
class JacobiTriple:
    sn: float | np.ndarray
    cn: float | np.ndarray
    dn: float | np.ndarray


def jacobi(u, k2: float) -> JacobiTriple:
    """``(sn, cn, dn)(u; k2)`` by the descending Landen (AGM) scheme.

    ``u`` may be a scalar or an array; the result fields have the same shape.
    """
    _check_k2(k2)
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if k2 == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    else:
        avals, cvals = _landen_sequence(k2)
        n = len(avals) - 1
        phi = (2.0 ** n) * avals[n] * u
        for j in range(n, 0, -1):
            phi = 0.5 * (phi + np.arcsin(cvals[j] / avals[j] * np.sin(phi)))
        sn = np.sin(phi)
        cn = np.cos(phi)
        dn = np.sqrt(1.0 - k2 * sn * sn)
    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)


def theta_of_w(w: float, k2: float, tol: float = 1e-14) -> float:
    """Real inverse of ``w = sn(theta; k2)**2`` on ``0 <= w < 1``.

    Evaluates ``int_0^{sqrt w} dt / sqrt((1-t^2)(1-k2 t^2))`` after the
    substitution ``t = sin(phi)``, which leaves a smooth integrand on
    ``[0, arcsin(sqrt w)]``. The result lies in ``[0, K)``.
    """
    _check_k2(k2)
    if not (0.0 <= w < 1.0):
        raise EllipticDomainError(f"w={w} outside [0, 1)")
    if w == 0.0:
        return 0.0
    upper = math.asin(math.sqrt(w))
    if k2 == 0.0:
        return upper
    res = integrate(lambda phi: 1.0 / np.sqrt(1.0 - k2 * np.sin(phi) ** 2), 0.0, upper, tol=tol)
    return res.value


def sn_power_integrand(terms, k2: float):
    """Split ``sum coef * (sn^2 u)^e * cn^i * dn^j`` as ``u**p * g(u)``.

    ``terms`` is a sequence of ``(coef, e, i, j)``; ``p`` is twice the
    smallest exponent among non-zero terms and ``g`` is bounded near
    ``u = 0`` (``sn(u)/u -> 1``). Coefficients may be complex.
    """
    live = [t for t in terms if t[0] != 0]
    if not live:
        return 0.0, lambda u: np.zeros_like(u)
    p = min(2.0 * t[1] for t in live)

    def g(u):
        jt = jacobi(u, k2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(u > 0, jt.sn / np.where(u > 0, u, 1.0), 1.0)
        out = np.zeros(np.shape(u), dtype=np.result_type(*[type(t[0]) for t in live], float))
        for coef, e, i, j in live:
            # (sn^2)^e = u^p * (sn/u)^(2e) * u^(2e - p)
            out = out + coef * ratio ** (2.0 * e) * u ** (2.0 * e - p) * jt.cn ** i * jt.dn ** j
        return out

    return p, g
