"""Exact associated-Heun functions built from sine/cosine convolution kernels.

With ``w = sn(theta; k2)**2`` each family satisfies a forced oscillator
equation ``G'' + 4 sigma G = J(theta)`` for ``G = prefactor(w) * Hn``, so

    prefactor(w) * Hn(w) = COS[f](theta) + SIN[g](theta)

with the two convolution operators

    COS[f](theta) = int_0^theta cos(2 sqrt(sigma) (theta - u)) f(u) du
    SIN[g](theta) = int_0^theta sin(2 sqrt(sigma) (theta - u)) / (2 sqrt(sigma)) g(u) du.

Both kernels are entire in ``sigma``; negative ``sigma`` turns them into
cosh/sinh and ``sigma = 0`` into ``1`` and ``theta - u``.

Each integrand is a sum of terms ``coef * (sn^2 u)^e * cn^i * dn^j``. Terms
are integrated with the smallest power ``u^(2 e_min)`` factored out so that
``(sn^2 u)^(c - 1/2)`` with small ``c`` stays accurate.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .elliptic import sn_power_integrand, theta_of_w
from .heun_core import AssocParams, HeunParams
from .quadrature import integrate_power_weight, integrate_singular

QUAD_TOL = 1e-12


class FamilyDomainError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    """``coef(c, mu, k2) * (sn^2 u)^(exponent(c)) * cn^cn_pow * dn^dn_pow``."""

    coef: Callable[[float, float, float], float]
    exponent: Callable[[float], float]
    cn_pow: int = 0
    dn_pow: int = 0


@dataclass(frozen=True)
class FamilySpec:
    id: int
    # (alpha, beta, gamma, delta, eps)
    param_template: tuple[float, float, float, float, float]
    sigma_shift: Callable[[float, float], float]
    # prefactor w^(c + a) (1 - w)^b (1 - k2 w)^d with (a, b, d)
    prefactor_exponents: tuple[float, float, float]
    cos_terms: tuple[Term, ...]
    sin_terms: tuple[Term, ...]

    def params(self, c: float, mu: float, sigma: float, k2: float) -> AssocParams:
        a, b, g, d, e = self.param_template
        s = sigma - self.sigma_shift(c, k2)
        return AssocParams(HeunParams(a, b, g, d, e, s, k2), c, mu)

    def sigma_from_s(self, s: float, c: float, k2: float) -> float:
        return s + self.sigma_shift(c, k2)

    def prefactor(self, w: float, c: float, k2: float) -> float:
        a, b, d = self.prefactor_exponents
        return w ** (c + a) * (1.0 - w) ** b * (1.0 - k2 * w) ** d


def _cos_bump(cn_pow=0, dn_pow=0):
    return Term(lambda c, mu, k2: 2.0 * c, lambda c: c - 0.5, cn_pow, dn_pow)


def _F_terms(cn_pow=0, dn_pow=0):
    return (Term(lambda c, mu, k2: 2.0 * c * (2.0 * c + 1.0), lambda c: c - 0.5, cn_pow, dn_pow),
            Term(lambda c, mu, k2: 4.0 * mu, lambda c: c + 0.5, cn_pow, dn_pow))


HALF = 0.5

FAMILIES: dict[int, FamilySpec] = {
    1: FamilySpec(
        1, (0.0, HALF, HALF, HALF, HALF),
        lambda c, k2: k2 * c * c,
        (0.0, 0.0, 0.0),
        (_cos_bump(1, 1),),
        (Term(lambda c, mu, k2: 4.0 * (c * c + c * c * k2 + mu), lambda c: c),
         Term(lambda c, mu, k2: -2.0 * c * (2.0 * c + 1.0) * k2, lambda c: c + 1.0)),
    ),
    2: FamilySpec(
        2, (HALF, 1.0, HALF, 1.5, HALF),
        lambda c, k2: 0.25 + k2 * c * c,
        (0.0, HALF, 0.0),
        (_cos_bump(0, 1),),
        (Term(lambda c, mu, k2: 4.0 * (k2 * c * c + mu), lambda c: c, 1, 0),),
    ),
    3: FamilySpec(
        3, (HALF, 1.0, HALF, HALF, 1.5),
        lambda c, k2: k2 * (c + HALF) ** 2,
        (0.0, 0.0, HALF),
        (_cos_bump(1, 0),),
        (Term(lambda c, mu, k2: 4.0 * (c * c + mu), lambda c: c, 0, 1),),
    ),
    4: FamilySpec(
        4, (1.0, 1.5, HALF, 1.5, 1.5),
        lambda c, k2: 0.25 + k2 * (c + HALF) ** 2,
        (0.0, HALF, HALF),
        (_cos_bump(0, 0),),
        (Term(lambda c, mu, k2: 4.0 * mu, lambda c: c, 1, 1),),
    ),
    5: FamilySpec(
        5, (HALF, 1.0, 1.5, HALF, HALF),
        lambda c, k2: 0.25 + k2 * (c + HALF) ** 2,
        (HALF, 0.0, 0.0),
        (),
        _F_terms(0, 0),
    ),
    6: FamilySpec(
        6, (1.0, 1.5, 1.5, 1.5, HALF),
        lambda c, k2: 1.0 + k2 * (c + HALF) ** 2,
        (HALF, HALF, 0.0),
        (),
        _F_terms(1, 0),
    ),
    7: FamilySpec(
        7, (1.0, 1.5, 1.5, HALF, 1.5),
        lambda c, k2: 0.25 + k2 * (c + 1.0) ** 2,
        (HALF, 0.0, HALF),
        (),
        _F_terms(0, 1),
    ),
    8: FamilySpec(
        8, (1.5, 2.0, 1.5, 1.5, 1.5),
        lambda c, k2: 1.0 + k2 * (c + 1.0) ** 2,
        (HALF, HALF, HALF),
        (),
        _F_terms(1, 1),
    ),
}


def get_family(family_id: int) -> FamilySpec:
    try:
        return FAMILIES[family_id]
    except KeyError:
        raise FamilyDomainError(f"family id must be 1..8, got {family_id}") from None


def _sin_kernel(x: np.ndarray, sigma: float) -> np.ndarray:
    if sigma == 0.0:
        return x
    r = 2.0 * cmath.sqrt(sigma)
    out = np.sin(r * x) / r
    if np.max(np.abs(out.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(out.real), initial=0.0)):
        raise ArithmeticError("sine kernel produced a non-negligible imaginary part")
    return out.real


def _cos_kernel(x: np.ndarray, sigma: float) -> np.ndarray:
    if sigma == 0.0:
        return np.ones_like(x)
    r = 2.0 * cmath.sqrt(sigma)
    out = np.cos(r * x)
    if np.max(np.abs(out.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(out.real), initial=0.0)):
        raise ArithmeticError("cosine kernel produced a non-negligible imaginary part")
    return out.real


def _convolve(kernel, f, theta: float, sigma: float, weight_exponent: float | None,
              tol: float) -> float:
    if theta < 0:
        raise FamilyDomainError("theta must be non-negative")
    if theta == 0.0:
        return 0.0
    if weight_exponent is None:
        return integrate_singular(lambda u: kernel(theta - u, sigma) * f(u), 0.0, theta,
                                  tol=tol).value
    return integrate_power_weight(lambda u: kernel(theta - u, sigma) * f(u), 0.0, theta,
                                  weight_exponent, tol=tol).value


def kernel_sin(f, theta: float, sigma: float, weight_exponent: float | None = None,
               tol: float = QUAD_TOL) -> float:
    """``int_0^theta sin(2 sqrt(sigma)(theta-u))/(2 sqrt(sigma)) f(u) du``.

    With ``weight_exponent = p`` the integrand is ``u**p * f(u)`` and the
    weight is handled analytically.
    """
    return _convolve(_sin_kernel, f, theta, sigma, weight_exponent, tol)


def kernel_cos(f, theta: float, sigma: float, weight_exponent: float | None = None,
               tol: float = QUAD_TOL) -> float:
    """``int_0^theta cos(2 sqrt(sigma)(theta-u)) f(u) du``."""
    return _convolve(_cos_kernel, f, theta, sigma, weight_exponent, tol)


def _terms_integrand(terms: tuple[Term, ...], c: float, mu: float, k2: float):
    """Return ``(p, g)`` with ``sum(terms)(u) = u**p * g(u)`` and ``g`` bounded."""
    return sn_power_integrand(
        [(t.coef(c, mu, k2), t.exponent(c), t.cn_pow, t.dn_pow) for t in terms], k2)


def closed_form_value(spec: FamilySpec, c: float, mu: float, sigma: float, w: float,
                      k2: float, tol: float = QUAD_TOL) -> float:
    """``prefactor(w) * Hn`` as the sum of the two kernel integrals."""
    if not (0.0 < w < 1.0):
        raise FamilyDomainError(f"w={w} outside (0, 1)")
    theta = theta_of_w(w, k2)
    total = 0.0
    for kernel, terms in ((kernel_cos, spec.cos_terms), (kernel_sin, spec.sin_terms)):
        if not terms:
            continue
        p, g = _terms_integrand(terms, c, mu, k2)
        total += kernel(g, theta, sigma, weight_exponent=p, tol=tol)
    return total


def eval_family(spec: FamilySpec, c: float, mu: float, sigma: float, w: float, k2: float,
                tol: float = QUAD_TOL) -> float:
    """``Hn(c, mu, P; w)`` for the family's parameter array with ``s = sigma - shift``."""
    if c <= 0.0:
        raise FamilyDomainError("eval_family needs c > 0; use limit_c0 for c -> 0")
    if not (0.0 < k2 < 1.0):
        raise FamilyDomainError(f"k2={k2} outside (0, 1)")
    return closed_form_value(spec, c, mu, sigma, w, k2, tol) / spec.prefactor(w, c, k2)


def limit_c0(spec: FamilySpec, mu: float, sigma: float, w: float, k2: float,
             tol: float = QUAD_TOL) -> float:
    """``lim_{c -> 0} Hn`` for families 1-4.

    ``2c (sn^2 u)^(c - 1/2) f(u)`` tends to ``delta(u) f(0)``, so the cosine
    part collapses to ``cos(2 sqrt(sigma) theta)`` and only the ``mu`` part
    of the sine integrand survives.
    """
    if spec.id > 4:
        raise FamilyDomainError(f"no c -> 0 limit formula for family {spec.id}")
    if not (0.0 < w < 1.0):
        raise FamilyDomainError(f"w={w} outside (0, 1)")
    theta = theta_of_w(w, k2)
    value = float(_cos_kernel(np.array([theta]), sigma)[0])
    if mu != 0.0:
        if spec.id == 1:
            # SIN[4 mu] in closed form
            if sigma == 0.0:
                value += 2.0 * mu * theta ** 2
            else:
                value += mu / sigma * (1.0 - float(_cos_kernel(np.array([theta]), sigma)[0]))
        else:
            p, g = _terms_integrand(spec.sin_terms, 0.0, mu, k2)
            value += kernel_sin(g, theta, sigma, weight_exponent=p, tol=tol)
    return value / spec.prefactor(w, 0.0, k2)


def carlitz_cos(sigma: float, w: float, k2: float) -> float:
    """``cos(2 sqrt(sigma) theta(w))`` (cosh for negative sigma)."""
    return float(_cos_kernel(np.array([theta_of_w(w, k2)]), sigma)[0])


def carlitz_sin(sigma: float, w: float, k2: float) -> float:
    """``sin(2 sqrt(sigma) theta(w)) / (2 sqrt(sigma))``."""
    return float(_sin_kernel(np.array([theta_of_w(w, k2)]), sigma)[0])


# Heun arrays (alpha, beta, gamma, delta, eps, s(sigma, k2)) and prefactor exponents
# (a, b, d) for which prefactor * Hn equals cos or sin kernel values exactly.
CARLITZ_COS = {
    1: ((0.0, HALF, HALF, HALF, HALF), lambda sg, k2: sg, (0.0, 0.0, 0.0)),
    2: ((HALF, 1.0, HALF, 1.5, HALF), lambda sg, k2: sg - 0.25, (0.0, HALF, 0.0)),
    3: ((HALF, 1.0, HALF, HALF, 1.5), lambda sg, k2: sg - 0.25 * k2, (0.0, 0.0, HALF)),
    4: ((1.0, 1.5, HALF, 1.5, 1.5), lambda sg, k2: sg - 0.25 * (1 + k2), (0.0, HALF, HALF)),
}
CARLITZ_SIN = {
    1: ((HALF, 1.0, 1.5, HALF, HALF), lambda sg, k2: sg - 0.25 * (1 + k2), (HALF, 0.0, 0.0)),
    2: ((1.0, 1.5, 1.5, 1.5, HALF), lambda sg, k2: sg - 1.0 - 0.25 * k2, (HALF, HALF, 0.0)),
    3: ((1.0, 1.5, 1.5, HALF, 1.5), lambda sg, k2: sg - 0.25 - k2, (HALF, 0.0, HALF)),
    4: ((1.5, 2.0, 1.5, 1.5, 1.5), lambda sg, k2: sg - 1.0 - k2, (HALF, HALF, HALF)),
}


def carlitz_params(kind: str, family_id: int, sigma: float, k2: float):
    """``(HeunParams, prefactor exponents)`` of the c = mu = 0 or c = 1/2 reductions."""
    table = {"cos": CARLITZ_COS, "sin": CARLITZ_SIN}[kind]
    (a, b, g, d, e), s_of, pexp = table[family_id]
    return HeunParams(a, b, g, d, e, s_of(sigma, k2), k2), pexp


def plain_prefactor(pexp: tuple[float, float, float], w: float, k2: float) -> float:
    a, b, d = pexp
    return w ** a * (1.0 - w) ** b * (1.0 - k2 * w) ** d
