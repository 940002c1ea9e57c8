"""Heun and associated-Heun functions around ``w = 0`` by power series.

Parameter conventions
---------------------
Heun's equation carries the array ``{alpha, beta; gamma, delta, eps; s}``
plus the elliptic parameter ``k2``, subject to the Fuchs relation
``alpha + beta = gamma + delta + eps - 1``. The associated equation adds the
association parameter ``c`` (shift ``n -> n + c`` of the rates) and the
co-recursivity parameter ``mu`` (bump of the ``n = 0`` death rate).

``Hn`` denotes the solution analytic in ``|w| < 1`` with ``Hn(0) = 1``; its
Taylor coefficients ``F_n`` obey a three-term recurrence whose rates are a
birth rate ``lam``, a death rate ``mu_n`` and a killing rate ``gam``.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.special import poch

FUCHS_TOL = 1e-12
DEFAULT_R_MAX = 0.9
DEFAULT_SERIES_TOL = 1e-15
MAX_TERMS = 200_000


class ParameterError(ValueError):
    pass


class TruncationError(RuntimeError):
    pass


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < 1e-12


@dataclass(frozen=True)
class HeunParams:
    alpha: float
    beta: float
    gamma: float
    delta: float
    eps: float
    s: float
    k2: float

    def __post_init__(self):
        if abs(self.fuchs_residual()) > FUCHS_TOL:
            raise ParameterError(
                "Fuchs relation alpha + beta = gamma + delta + eps - 1 violated "
                f"(residual {self.fuchs_residual():.3g})")
        if not (0.0 <= self.k2 <= 1.0):
            raise ParameterError(f"k2={self.k2} outside [0, 1]")

    def fuchs_residual(self) -> float:
        return self.alpha + self.beta - self.gamma - self.delta - self.eps + 1.0


@dataclass(frozen=True)
class AssocParams:
    base: HeunParams
    c: float = 0.0
    mu: float = 0.0

    def validate_series(self) -> None:
        """Reject parameters for which some ``mu_n`` (n >= 1) vanishes."""
        if _is_nonpositive_integer(1.0 + self.c):
            raise ParameterError(f"1 + c = {1.0 + self.c} is a non-positive integer")
        if _is_nonpositive_integer(self.base.gamma + self.c):
            raise ParameterError(
                f"gamma + c = {self.base.gamma + self.c} is a non-positive integer")

    def as_dict(self) -> dict:
        d = asdict(self.base)
        d.update(c=self.c, mu=self.mu)
        return d


def heun(alpha, beta, gamma, delta, eps, s, k2, c=0.0, mu=0.0) -> AssocParams:
    """Shorthand constructor for an :class:`AssocParams`."""
    return AssocParams(HeunParams(alpha, beta, gamma, delta, eps, s, k2), c, mu)


@dataclass(frozen=True)
class RateTriple:
    lam: float
    mu_n: float
    gam: float


def heun_rates(P: HeunParams, n: int) -> RateTriple:
    lam = P.k2 * (n + P.alpha) * (n + P.beta)
    mu_n = n * (n + P.gamma - 1.0)
    gam = (1.0 - P.k2) * P.delta * n
    return RateTriple(lam, mu_n, gam)


def assoc_rates(A: AssocParams, n: int) -> RateTriple:
    P, c = A.base, A.c
    lam = P.k2 * (n + c + P.alpha) * (n + c + P.beta)
    mu_n = (n + c) * (n + c + P.gamma - 1.0) + (A.mu if n == 0 else 0.0)
    gam = (1.0 - P.k2) * P.delta * (n + c)
    return RateTriple(lam, mu_n, gam)


def _params_hash(d: dict) -> str:
    blob = json.dumps(d, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class CoeffSeries:
    """Taylor coefficients ``F_0 .. F_N`` of ``Hn`` (read-only array)."""

    coeffs: np.ndarray
    params: dict = field(compare=False)
    params_hash: str = ""

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        if not self.params_hash:
            object.__setattr__(self, "params_hash", _params_hash(self.params))

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def to_json(self) -> str:
        return json.dumps({"params": self.params, "N": self.N,
                           "coeffs": [float(x) for x in self.coeffs]})

    @classmethod
    def from_json(cls, text: str) -> "CoeffSeries":
        d = json.loads(text)
        if len(d["coeffs"]) != d["N"] + 1:
            raise ValueError("coeffs length does not match N")
        return cls(np.array(d["coeffs"]), d["params"])


def _three_term(lhs_const, lam, mu_next, N: int, label: str) -> np.ndarray:
    """Run ``lhs_const[n] F_n = mu_next[n] F_{n+1} + lam[n-1] F_{n-1}`` upward."""
    F = np.zeros(N + 1)
    F[0] = 1.0
    prev = 0.0
    for n in range(N):
        if mu_next[n] == 0.0:
            raise ParameterError(f"{label}: mu_{n + 1} vanishes, recurrence breaks at n={n}")
        lam_prev = lam[n - 1] if n > 0 else 0.0
        F[n + 1] = (lhs_const[n] * F[n] - lam_prev * prev) / mu_next[n]
        prev = F[n]
    return F


def heun_coeffs(P: HeunParams, N: int) -> CoeffSeries:
    """Coefficients of ``Hn(P, w)`` from the plain Heun recurrence."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if _is_nonpositive_integer(P.gamma):
        raise ParameterError(f"gamma={P.gamma} is a non-positive integer")
    n = np.arange(N + 1, dtype=float)
    lam = P.k2 * (n + P.alpha) * (n + P.beta)
    mu = n * (n + P.gamma - 1.0)
    gam = (1.0 - P.k2) * P.delta * n
    lhs = lam + mu + gam - P.s - P.alpha * P.beta * P.k2
    mu_next = (n + 1) * (n + P.gamma)
    F = _three_term(lhs, lam, mu_next, N, "heun_coeffs")
    return CoeffSeries(F, AssocParams(P).as_dict())


def assoc_coeffs(A: AssocParams, N: int) -> CoeffSeries:
    """Coefficients of ``Hn(c, mu, P; w)`` from the associated recurrence."""
    if N < 0:
        raise ValueError("N must be >= 0")
    A.validate_series()
    P, c = A.base, A.c
    n = np.arange(N + 1, dtype=float)
    lam = P.k2 * (n + c + P.alpha) * (n + c + P.beta)
    mu = (n + c) * (n + c + P.gamma - 1.0)
    mu[0] += A.mu
    gam = (1.0 - P.k2) * P.delta * (n + c)
    lhs = (lam + mu + gam - P.s - (P.alpha + c) * (P.beta + c) * P.k2
           + P.k2 * P.delta * c)
    mu_next = (n + 1 + c) * (n + 1 + c + P.gamma - 1.0)
    F = _three_term(lhs, lam, mu_next, N, "assoc_coeffs")
    return CoeffSeries(F, A.as_dict())


def _horner(coeffs: np.ndarray, w):
    out = np.zeros_like(np.asarray(w, dtype=float)) + coeffs[-1]
    for a in coeffs[-2::-1]:
        out = out * w + a
    return out


def tail_estimate(S: CoeffSeries, w, window: int = 10) -> float:
    """Bound-style estimate of ``sum_{n>N} F_n w^n``.

    Uses the largest of the last ``window`` terms and the geometric factor
    ``1/(1 - |w|)`` appropriate for radius of convergence 1.
    """
    aw = float(np.max(np.abs(w)))
    if aw == 0.0:
        return 0.0
    if aw >= 1.0:
        return math.inf
    # F_0 only enters the window for N = 0
    k = max(1, min(window, S.N))
    n = np.arange(S.N + 1 - k, S.N + 1)
    with np.errstate(under="ignore"):
        terms = np.abs(S.coeffs[-k:]) * aw ** n
    return float(np.max(terms)) * aw / (1.0 - aw)


def eval_series(S: CoeffSeries, w, tol: float = DEFAULT_SERIES_TOL,
                r_max: float = DEFAULT_R_MAX):
    """``sum_{n<=N} F_n w^n`` (scalar or array ``w``).

    Raises :class:`TruncationError` if the estimated tail exceeds
    ``tol * max(1, |value|)``; callers wanting the raw partial sum can pass
    ``tol=math.inf``.
    """
    aw = np.max(np.abs(w))
    if aw > r_max:
        raise ValueError(f"|w|={aw} exceeds r_max={r_max}")
    value = _horner(S.coeffs, w)
    tail = tail_estimate(S, w)
    scale = max(1.0, float(np.max(np.abs(value))))
    if tail > tol * scale:
        raise TruncationError(
            f"N={S.N} too small at |w|={aw}: tail estimate {tail:.3g} > {tol * scale:.3g}")
    if np.ndim(w) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class SeriesValue:
    value: float
    N: int
    tail: float


def series_for(A: AssocParams, w, tol: float = DEFAULT_SERIES_TOL,
               r_max: float = DEFAULT_R_MAX, N0: int = 32) -> CoeffSeries:
    """Smallest power-of-two truncation whose tail passes at ``max|w|``."""
    aw = float(np.max(np.abs(w)))
    if aw > r_max:
        raise ValueError(f"|w|={aw} exceeds r_max={r_max}")
    N = N0
    while True:
        S = assoc_coeffs(A, N)
        # same scale as eval_series so that the returned truncation passes there
        val = np.max(np.abs(_horner(S.coeffs, w)))
        if tail_estimate(S, aw) <= tol * max(1.0, float(val)):
            return S
        if N >= MAX_TERMS:
            raise TruncationError(f"no truncation below {MAX_TERMS} terms meets tol={tol:g}")
        N *= 2


def assoc_eval(A: AssocParams, w: float, tol: float = DEFAULT_SERIES_TOL,
               r_max: float = DEFAULT_R_MAX) -> SeriesValue:
    S = series_for(A, w, tol, r_max)
    return SeriesValue(eval_series(S, w, tol, r_max), S.N, tail_estimate(S, w))


def heun_eval(P: HeunParams, w: float, tol: float = DEFAULT_SERIES_TOL,
              r_max: float = DEFAULT_R_MAX) -> SeriesValue:
    A = AssocParams(P)
    S = series_for(A, w, tol, r_max)
    S = heun_coeffs(P, S.N)
    return SeriesValue(eval_series(S, w, tol, r_max), S.N, tail_estimate(S, w))


def Hn(A: AssocParams | HeunParams, w, tol: float = DEFAULT_SERIES_TOL,
       r_max: float = DEFAULT_R_MAX):
    """Value of ``Hn`` at scalar or array ``w`` with automatic truncation."""
    if isinstance(A, HeunParams):
        A = AssocParams(A)
    return eval_series(series_for(A, w, tol, r_max), w, tol, r_max)


def monic_G(S: CoeffSeries, c: float, gamma: float) -> np.ndarray:
    """``G_n = (1+c)_n (gamma+c)_n F_n``; ``(-1)^n G_n`` is monic in the spectral variable."""
    n = np.arange(S.N + 1)
    return poch(1.0 + c, n) * poch(gamma + c, n) * S.coeffs


def spectral_variable(A: AssocParams) -> float:
    """``x = s + k2 (alpha+c)(beta+c) - k2 delta c``."""
    P, c = A.base, A.c
    return P.s + P.k2 * (P.alpha + c) * (P.beta + c) - P.k2 * P.delta * c


def _with_base(A: AssocParams, **kw) -> AssocParams:
    return replace(A, base=replace(A.base, **{k: v for k, v in kw.items() if k not in ("c", "mu")}),
                   **{k: v for k, v in kw.items() if k in ("c", "mu")})


def map_P_alpha(A: AssocParams) -> AssocParams:
    """Swap ``alpha <-> gamma``, shifting ``delta`` and ``eps`` by ``gamma - alpha``."""
    P = A.base
    d = P.gamma - P.alpha
    return _with_base(A, alpha=P.gamma, gamma=P.alpha, delta=P.delta + d, eps=P.eps + d)


def map_P_beta(A: AssocParams) -> AssocParams:
    P = A.base
    d = P.gamma - P.beta
    return _with_base(A, beta=P.gamma, gamma=P.beta, delta=P.delta + d, eps=P.eps + d)


def map_P_alpha2(A: AssocParams) -> AssocParams:
    """Second invariance map of the monic recurrence; moves ``c`` to ``c + alpha - 1``."""
    P = A.base
    a = P.alpha
    return _with_base(A, alpha=2.0 - a, beta=P.beta + 1.0 - a, gamma=P.gamma + 1.0 - a,
                      delta=P.delta + 1.0 - a, eps=P.eps + 1.0 - a,
                      s=P.s + (a - 1.0) * (P.gamma + P.delta - a), c=A.c + (a - 1.0))


def map_P_beta2(A: AssocParams) -> AssocParams:
    P = A.base
    b = P.beta
    return _with_base(A, beta=2.0 - b, alpha=P.alpha + 1.0 - b, gamma=P.gamma + 1.0 - b,
                      delta=P.delta + 1.0 - b, eps=P.eps + 1.0 - b,
                      s=P.s + (b - 1.0) * (P.gamma + P.delta - b), c=A.c + (b - 1.0))


def map_tilde(P: HeunParams) -> HeunParams:
    """Heun array reproduced by the associated function at ``c = 1 - gamma, mu = 0``."""
    g = 1.0 - P.gamma
    return replace(P, alpha=g + P.alpha, beta=g + P.beta, gamma=2.0 - P.gamma,
                   s=P.s - g * P.delta)


def hyp2f1_series(a, b, c, w, tol: float = 1e-17, max_terms: int = MAX_TERMS) -> complex:
    """Gauss ``2F1(a, b; c; w)`` by its power series (``|w| < 1``, complex parameters allowed)."""
    if abs(w) >= 1.0:
        raise ValueError("hyp2f1_series requires |w| < 1")
    if isinstance(c, (int, float)) and _is_nonpositive_integer(c):
        raise ParameterError(f"c={c} is a non-positive integer")
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    quiet = 0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * w
        total += term
        if abs(term) <= tol * abs(total):
            quiet += 1
            if quiet >= 10:
                return total
        else:
            quiet = 0
    raise TruncationError("2F1 series did not converge")


def _real_part(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-12 * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{what}: imaginary part {z.imag:.3g} not negligible")
    return z.real


def special_k0(P: HeunParams, w: float) -> float:
    """``Hn`` at ``k2 = 0``: ``2F1(r+, r-; gamma; w)``, ``r± = a ± sqrt(a^2 + s)``."""
    if P.k2 != 0.0:
        raise ParameterError("special_k0 needs k2 = 0")
    a = 0.5 * (P.gamma + P.delta - 1.0)
    root = cmath.sqrt(a * a + P.s)
    return _real_part(hyp2f1_series(a + root, a - root, P.gamma, w), "special_k0")


def special_k1(P: HeunParams, w: float) -> float:
    """``Hn`` at ``k2 = 1``: ``(1-w)^r 2F1(r+alpha, r+beta; gamma; w)``."""
    if P.k2 != 1.0:
        raise ParameterError("special_k1 needs k2 = 1")
    a = 0.5 * (P.gamma - P.alpha - P.beta)
    r = a + cmath.sqrt(a * a - P.alpha * P.beta - P.s)
    val = (1.0 - w) ** r * hyp2f1_series(r + P.alpha, r + P.beta, P.gamma, w)
    return _real_part(val, "special_k1")


def _derivs(coeffs: np.ndarray, w: float) -> tuple[float, float, float]:
    n = np.arange(coeffs.size, dtype=float)
    f0 = float(_horner(coeffs, w))
    f1 = float(_horner((n * coeffs)[1:], w)) if coeffs.size > 1 else 0.0
    f2 = float(_horner((n * (n - 1) * coeffs)[2:], w)) if coeffs.size > 2 else 0.0
    return f0, f1, f2


def ode_residual(A: AssocParams, S: CoeffSeries, w: float) -> float:
    """Residual of the associated Heun equation at ``w``, relative to the largest term.

    With ``c = mu = 0`` this is the residual of Heun's equation itself.
    """
    if not (0.0 < w <= DEFAULT_R_MAX):
        raise ValueError("ode_residual needs 0 < w <= 0.9")
    P, c = A.base, A.c
    k2 = P.k2
    F, dF, d2F = _derivs(S.coeffs, w)
    cc = c * (c + P.gamma - 1.0)
    terms = [
        w * (1 - w) * (1 - k2 * w) * d2F,
        ((P.gamma + 2 * c) * (1 - w) * (1 - k2 * w) - P.delta * w * (1 - k2 * w)
         - P.eps * k2 * w * (1 - w)) * dF,
        (P.alpha + c) * (P.beta + c) * k2 * w * F,
        cc * ((1 - w) * F - 1.0) / w,
        (P.s - P.delta * c) * F,
        -A.mu,
    ]
    scale = max(abs(t) for t in terms)
    return abs(math.fsum(terms)) / max(scale, 1e-300)
