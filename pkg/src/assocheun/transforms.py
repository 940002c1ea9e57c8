"""Integral connection relations between associated Heun functions.

First relation (``P'`` swaps ``alpha`` and ``gamma``, valid for
``gamma > alpha > -c``)::

    Hn(c, mu, P; w) = 1/B(gamma - alpha, alpha + c)
        * int_0^1 t^(c+alpha-1) (1-t)^(gamma-alpha-1) Hn(c, mu, P'; w t) dt

Second relation (``P''`` moves the association parameter to
``c + alpha - 1``, valid for ``1 > alpha > -c``)::

    Hn(c, mu, P; w) = 1/B(1 - alpha, c + alpha)
        * int_0^1 t^(c+alpha-1) (1-t)^(-alpha) Hn(c+alpha-1, mu, P''; w t) dt

Both follow from the Pochhammer ratios linking the Taylor coefficients, and
both have ``beta`` variants obtained by exchanging the roles of alpha and beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .heun_core import (DEFAULT_R_MAX, AssocParams, eval_series, map_P_alpha, map_P_alpha2,
                        map_P_beta, map_P_beta2, series_for)
from .quadrature import integrate_jacobi_weight

QUAD_TOL = 1e-12


class TransformDomainError(ValueError):
    pass


@dataclass(frozen=True)
class TransformReport:
    lhs: float
    rhs: float
    abs_diff: float
    params_in: AssocParams
    params_out: AssocParams

    def as_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "abs_diff": self.abs_diff,
                "params_in": self.params_in.as_dict(), "params_out": self.params_out.as_dict()}


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function ``Gamma(a)Gamma(b)/Gamma(a+b)`` for positive arguments."""
    if a <= 0 or b <= 0:
        raise ValueError(f"beta_fn needs positive arguments, got ({a}, {b})")
    return math.exp(betaln(a, b))


def _pick(A: AssocParams, which: str) -> float:
    if which == "alpha":
        return A.base.alpha
    if which == "beta":
        return A.base.beta
    raise ValueError("which must be 'alpha' or 'beta'")


def _report(A: AssocParams, A_out: AssocParams, w: float, pa: float, pb: float,
            norm: float, tol: float) -> TransformReport:
    if abs(w) > DEFAULT_R_MAX:
        raise TransformDomainError(f"|w|={abs(w)} exceeds {DEFAULT_R_MAX}")
    S_in = series_for(A, w)
    lhs = eval_series(S_in, w)
    S_out = series_for(A_out, w)

    def inner(t):
        return eval_series(S_out, w * t)

    # tol applies to rhs, i.e. after division by the Beta normalizer
    integral = integrate_jacobi_weight(inner, pa, pb, tol=tol * norm).value
    rhs = integral / norm
    return TransformReport(lhs, rhs, abs(lhs - rhs), A, A_out)


def transform_first(A: AssocParams, w: float, which: str = "alpha",
                    tol: float = QUAD_TOL) -> TransformReport:
    a = _pick(A, which)
    g, c = A.base.gamma, A.c
    if not (g > a > -c):
        raise TransformDomainError(
            f"first transform needs gamma > {which} > -c; got gamma={g}, {which}={a}, c={c}")
    A_out = map_P_alpha(A) if which == "alpha" else map_P_beta(A)
    norm = beta_fn(g - a, a + c)
    return _report(A, A_out, w, c + a - 1.0, g - a - 1.0, norm, tol)


def transform_second(A: AssocParams, w: float, which: str = "alpha",
                     tol: float = QUAD_TOL) -> TransformReport:
    a = _pick(A, which)
    c = A.c
    if not (1.0 > a > -c):
        raise TransformDomainError(
            f"second transform needs 1 > {which} > -c; got {which}={a}, c={c}")
    A_out = map_P_alpha2(A) if which == "alpha" else map_P_beta2(A)
    norm = beta_fn(1.0 - a, c + a)
    return _report(A, A_out, w, c + a - 1.0, -a, norm, tol)


def pochhammer_ratio_integral(n: int, x: float, y: float, tol: float = 1e-13) -> float:
    """``(1/B(y-x, x)) int_0^1 t^(n+x-1) (1-t)^(y-x-1) dt``, equal to ``(x)_n/(y)_n``."""
    norm = beta_fn(y - x, x)
    val = integrate_jacobi_weight(lambda t: np.ones_like(t), n + x - 1.0, y - x - 1.0,
                                  tol=tol * norm).value
    return val / norm
