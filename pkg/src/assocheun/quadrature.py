"""One-dimensional adaptive quadrature.

Three entry points share the :class:`QuadResult` container:

* :func:`integrate` -- globally adaptive Gauss-Kronrod (G7/K15) for smooth
  integrands.
* :func:`integrate_singular` -- tanh-sinh (double exponential) rule, which
  tolerates algebraic endpoint singularities ``(t - a)**p`` with ``p > -1``.
* :func:`integrate_power_weight` -- ``int_a^b (t - a)**p g(t) dt`` for smooth
  ``g``; the weight is removed analytically by ``v = (t - a)**(p + 1)`` so
  exponents close to ``-1`` cost nothing extra.

Integrands are called with a 1-d ``numpy`` array of abscissae and must
return an array of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DEPTH = 20
DEFAULT_MAX_LEVEL = 12

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("abs_error_estimate must be non-negative")
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")


class QuadratureError(RuntimeError):
    """Raised when the requested tolerance is not met; ``result`` holds the best estimate."""

    def __init__(self, message: str, result: QuadResult):
        super().__init__(message)
        self.result = result


class DivergentIntegralError(ValueError):
    pass


# Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half, Kronrod ordering).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss points are the odd-indexed Kronrod nodes (1, 3, 5, 7) in _XGK.
_GWEIGHTS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GWEIGHTS[_i] = _w
    _GWEIGHTS[14 - _i] = _w
_GWEIGHTS[7] = _WG[3]


def _as_array_fn(f: ArrayFn) -> ArrayFn:
    def wrapped(x):
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        return y
    return wrapped


def _gk15(f: ArrayFn, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = f(mid + half * _NODES)
    if not np.all(np.isfinite(fx)):
        raise ValueError(f"integrand not finite on [{a}, {b}]")
    k = half * float(_KWEIGHTS @ fx)
    g = half * float(_GWEIGHTS @ fx)
    return k, abs(k - g)


def integrate(f: ArrayFn, a: float, b: float, tol: float = DEFAULT_TOL,
              max_depth: int = DEFAULT_MAX_DEPTH, rel_tol: float = 0.0) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of a smooth integrand over [a, b].

    The interval with the largest error estimate is bisected until the summed
    estimate drops below ``max(tol, rel_tol * |value|)``. An interval is not
    split past ``max_depth`` bisections; if the target is still missed a
    :class:`QuadratureError` carrying the best estimate is raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a > b:
        raise ValueError("integrate requires a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 1)
    f = _as_array_fn(f)
    value, err = _gk15(f, a, b)
    evals = 15
    # heap entries: (-err, a, b, value, err, depth)
    heap = [(-err, a, b, value, err, 0)]
    frozen_value = 0.0
    frozen_err = 0.0
    while True:
        total = frozen_value + sum(item[3] for item in heap)
        total_err = frozen_err + sum(item[4] for item in heap)
        if total_err <= max(tol, rel_tol * abs(total)) or not heap:
            break
        _, lo, hi, v, e, depth = heapq.heappop(heap)
        if depth >= max_depth:
            frozen_value += v
            frozen_err += e
            continue
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        evals += 30
        heapq.heappush(heap, (-e1, lo, mid, v1, e1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2, depth + 1))
    result = QuadResult(total, total_err, evals)
    if total_err > max(tol, rel_tol * abs(total)):
        raise QuadratureError(
            f"Gauss-Kronrod did not reach tol={tol:g} within depth {max_depth} "
            f"(estimate {total_err:.3g})", result)
    return result


def _ts_offsets(level: int, t_max: float) -> np.ndarray:
    """Tanh-sinh step positions added at ``level`` (level 0 includes t = 0)."""
    h = 2.0 ** -level
    if level == 0:
        return np.arange(0.0, t_max + h, h)
    n = int(t_max / h) + 1
    return h * (2 * np.arange((n + 1) // 2) + 1)


def integrate_singular(f: Callable[..., np.ndarray], a: float, b: float, p: float = 0.0,
                       tol: float = DEFAULT_TOL, max_depth: int = DEFAULT_MAX_LEVEL,
                       rel_tol: float = 0.0, distances: bool = False) -> QuadResult:
    """Tanh-sinh quadrature for integrands behaving as ``(t - a)**p`` near ``a``.

    ``p`` is only used to reject divergent integrals and to size the estimate
    of the discarded tail next to ``a``; the rule itself does not need it.
    The right endpoint may carry a singularity as well, but ``b - t`` then
    loses relative accuracy as ``t -> b``; pass ``distances=True`` to have
    ``f`` called as ``f(t, t - a, b - t)`` with both distances computed
    without cancellation. Step size is halved ``max_depth`` times at most.
    """
    if p <= -1:
        raise DivergentIntegralError(f"endpoint exponent p={p} <= -1: integral diverges")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a > b:
        raise ValueError("integrate_singular requires a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 1)
    if distances:
        fd = f
    else:
        f1 = _as_array_fn(f)

        def fd(x, da, db):
            return f1(x)
    length = b - a
    t_max = 6.5
    err = math.inf
    total = 0.0
    evals = 0
    prev = None
    tail = 0.0
    for level in range(max_depth + 1):
        t = _ts_offsets(level, t_max)
        y = 0.5 * math.pi * np.sinh(t)
        with np.errstate(over="ignore"):
            # distance from the nearer endpoint, accurate near the endpoint
            d = length / (1.0 + np.exp(2.0 * y))
            w = length * 0.25 * math.pi * np.cosh(t) / np.cosh(y) ** 2
        keep_l = (d > 0) & (w > 0)
        keep_r = keep_l.copy()
        if not distances:
            # nodes that round onto an endpoint carry no information
            keep_l &= a + d > a
            keep_r &= b - d < b
        if level == 0:
            # t = 0 is the midpoint; count it once
            keep_r[0] = False
        xl = a + d[keep_l]
        xr = b - d[keep_r]
        dl, dr = d[keep_l], d[keep_r]
        fl = np.asarray(fd(xl, dl, length - dl), dtype=float) if xl.size else np.empty(0)
        fr = np.asarray(fd(xr, length - dr, dr), dtype=float) if xr.size else np.empty(0)
        if not (np.all(np.isfinite(fl)) and np.all(np.isfinite(fr))):
            raise ValueError("integrand not finite at an interior tanh-sinh node")
        evals += xl.size + xr.size
        h = 2.0 ** -level
        contrib = float(w[keep_l] @ fl + w[keep_r] @ fr)
        if level == 0:
            total = h * contrib
            tail = 0.0
            if xl.size:
                tail += abs(fl[-1]) * d[keep_l][-1] / (p + 1.0)
            if xr.size:
                tail += abs(fr[-1]) * d[keep_r][-1]
        else:
            total = 0.5 * total + h * contrib
        if prev is not None:
            # floor at the rounding level of the weighted sum
            err = abs(total - prev) + tail + 4 * np.finfo(float).eps * abs(total)
            if level >= 3 and err <= max(tol, rel_tol * abs(total)):
                return QuadResult(total, err, max(evals, 1))
        prev = total
    result = QuadResult(total, err, max(evals, 1))
    raise QuadratureError(
        f"tanh-sinh did not reach tol={tol:g} after {max_depth} halvings "
        f"(estimate {err:.3g})", result)


def integrate_power_weight(g: ArrayFn, a: float, b: float, p: float,
                           tol: float = DEFAULT_TOL, max_depth: int = DEFAULT_MAX_LEVEL,
                           rel_tol: float = 0.0) -> QuadResult:
    """``int_a^b (t - a)**p * g(t) dt`` for ``g`` smooth on [a, b] and ``p > -1``.

    Substituting ``v = (t - a)**(p + 1)`` turns the integral into
    ``1/(p+1) * int_0^{(b-a)**(p+1)} g(a + v**(1/(p+1))) dv`` whose integrand
    is bounded, so exponents arbitrarily close to -1 are handled. ``g`` is
    evaluated at ``a`` itself when ``v**(1/(p+1))`` underflows.
    """
    if p <= -1:
        raise DivergentIntegralError(f"endpoint exponent p={p} <= -1: integral diverges")
    if a > b:
        raise ValueError("integrate_power_weight requires a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 1)
    if p == 0:
        return integrate_singular(g, a, b, 0.0, tol, max_depth, rel_tol)
    q = p + 1.0
    upper = (b - a) ** q
    g = _as_array_fn(g)

    def h(v):
        return g(a + v ** (1.0 / q)) / q

    res = integrate_singular(h, 0.0, upper, 0.0, tol, max_depth, rel_tol)
    return res


def integrate_jacobi_weight(g: ArrayFn, pa: float, pb: float, tol: float = DEFAULT_TOL,
                            max_depth: int = DEFAULT_MAX_LEVEL) -> QuadResult:
    """``int_0^1 t**pa (1 - t)**pb g(t) dt`` with both weights handled exactly.

    The interval is split at 1/2 and the right half reflected, so each piece
    sees its singular factor at a left endpoint where distances are exact.
    """
    def left(t):
        return (1.0 - t) ** pb * g(t)

    def right(x):
        return (1.0 - x) ** pa * g(1.0 - x)

    r1 = integrate_power_weight(left, 0.0, 0.5, pa, 0.5 * tol, max_depth)
    r2 = integrate_power_weight(right, 0.0, 0.5, pb, 0.5 * tol, max_depth)
    return QuadResult(r1.value + r2.value, r1.abs_error_estimate + r2.abs_error_estimate,
                      r1.evaluations + r2.evaluations)


def integrate_complex(integrator: Callable[..., QuadResult], f: Callable[[np.ndarray], np.ndarray],
                      *args, **kwargs) -> tuple[complex, float, int]:
    """Run a real integrator separately on Re f and Im f.

    Returns ``(value, abs_error_estimate, evaluations)``.
    """
    re = integrator(lambda x: np.real(f(x)), *args, **kwargs)
    im = integrator(lambda x: np.imag(f(x)), *args, **kwargs)
    return (complex(re.value, im.value), math.hypot(re.abs_error_estimate, im.abs_error_estimate),
            re.evaluations + im.evaluations)
