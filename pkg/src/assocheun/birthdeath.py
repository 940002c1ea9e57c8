"""Truncated Kolmogorov forward system of the associated Stieltjes-Carlitz process.

States ``n = 0..N_trunc`` start from ``P_{0,n}(0) = delta_{0n}``::

    dP_n/dt = lam_{n-1} P_{n-1} + mu_{n+1} P_{n+1} - (lam_n + mu_n) P_n

Mass leaves through the death rate ``mu_0 = 4c^2 + mu`` at ``n = 0`` and
through births out of the last retained state. The Laplace transform of
``P_00`` is compared with ``-S(-p)`` (Karlin-McGregor).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .elliptic import jacobi
from .heun_core import hyp2f1_series
from .stieltjes import SCRates, stieltjes_S

NEG_SLACK = 1e-9
RK4_CFL = 0.1


class StepSizeError(RuntimeError):
    pass


class HorizonError(ValueError):
    pass


@dataclass(frozen=True)
class BDState:
    probs: np.ndarray
    t: float
    r: SCRates


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    p00: np.ndarray
    dt: float
    N_trunc: int
    snapshots: tuple[BDState, ...] = field(default=(), compare=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,p00\n")
        for t, p in zip(self.times, self.p00):
            buf.write(f"{t:.10g},{p:.17g}\n")
        return buf.getvalue()


def generator(r: SCRates, N_trunc: int) -> np.ndarray:
    """Dense forward generator ``Q`` with ``dP/dt = Q P`` on states ``0..N_trunc``."""
    n = np.arange(N_trunc + 1)
    lam = r.lam(n)
    mu = r.mu_n(n)
    Q = np.diag(-(lam + mu))
    Q += np.diag(lam[:-1], -1)
    Q += np.diag(mu[1:], 1)
    return Q


def _check_state(P: np.ndarray, t: float) -> None:
    lo = P.min()
    if lo < -NEG_SLACK or P.sum() > 1.0 + NEG_SLACK:
        raise StepSizeError(f"probabilities left [0, 1] at t={t:.6g} (min {lo:.3g}); "
                            "reduce the step size")


def solve_kolmogorov(r: SCRates, N_trunc: int, t_max: float, dt: float,
                     method: str = "expm", cfl: float = RK4_CFL,
                     snapshot_times=()) -> Trajectory:
    """Integrate the truncated forward equations and sample ``P_00`` every ``dt``.

    ``method="rk4"`` uses classical Runge-Kutta with substeps ``h`` such that
    ``h * max(lam_n + mu_n) <= cfl``; ``method="expm"`` propagates with the
    exact one-step matrix ``exp(Q dt)``, which is free of any stability limit.
    ``snapshot_times`` selects times whose full state vector is kept.
    """
    if N_trunc < 50:
        raise ValueError("N_trunc must be >= 50")
    if dt <= 0 or t_max <= 0:
        raise ValueError("dt and t_max must be positive")
    steps = int(round(t_max / dt))
    Q = generator(r, N_trunc)
    P = np.zeros(N_trunc + 1)
    P[0] = 1.0
    snap_idx = {int(round(t / dt)): t for t in snapshot_times}
    snaps = []
    p00 = np.empty(steps + 1)
    p00[0] = 1.0
    if 0 in snap_idx:
        snaps.append(BDState(P.copy(), 0.0, r))

    if method == "expm":
        E = expm(Q * dt)

        def advance(P):
            return E @ P
    elif method == "rk4":
        max_rate = float(-np.diag(Q).min())
        m = max(1, math.ceil(dt * max_rate / cfl))
        h = dt / m

        def advance(P):
            for _ in range(m):
                k1 = Q @ P
                k2 = Q @ (P + 0.5 * h * k1)
                k3 = Q @ (P + 0.5 * h * k2)
                k4 = Q @ (P + h * k3)
                P = P + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            return P
    else:
        raise ValueError(f"unknown method {method!r}")

    for i in range(1, steps + 1):
        P = advance(P)
        _check_state(P, i * dt)
        p00[i] = P[0]
        if i in snap_idx:
            snaps.append(BDState(P.copy(), i * dt, r))
    times = dt * np.arange(steps + 1)
    return Trajectory(times, p00, dt, N_trunc, tuple(snaps))


def truncation_change(r: SCRates, N_trunc: int, t_max: float, dt: float,
                      method: str = "expm") -> float:
    """``max_t |P_00|`` difference between ``N_trunc`` and ``1.5 N_trunc`` states."""
    a = solve_kolmogorov(r, N_trunc, t_max, dt, method)
    b = solve_kolmogorov(r, int(math.ceil(1.5 * N_trunc)), t_max, dt, method)
    return float(np.max(np.abs(a.p00 - b.p00)))


def _trapezoid(y: np.ndarray, h: float) -> float:
    return h * (y.sum() - 0.5 * (y[0] + y[-1]))


def laplace_p00(traj: Trajectory, p: float, return_error: bool = False):
    """``int_0^inf exp(-p t) P_00(t) dt`` from the sampled trajectory.

    Composite trapezoid on the stored grid, plus an exponential tail
    ``P(t_max) exp(-p t_max) / (p + kappa)`` with ``kappa`` fitted on the last
    tenth of the window. The error estimate combines the trapezoid-vs-
    half-grid difference (Richardson) and the size of the tail.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    t, y = traj.times, traj.p00
    t_max = float(t[-1])
    f = np.exp(-p * t) * y
    body = _trapezoid(f, traj.dt)
    if f.size >= 5 and (f.size - 1) % 2 == 0:
        coarse = _trapezoid(f[::2], 2 * traj.dt)
        quad_err = abs(body - coarse) / 3.0
        body = body + (body - coarse) / 3.0
    else:
        quad_err = 0.0
    tail_start = int(0.9 * (t.size - 1))
    ys = y[tail_start:]
    tail = 0.0
    tail_err = 0.0
    if np.all(ys > 0) and ys.size >= 2:
        kappa = -np.polyfit(t[tail_start:], np.log(ys), 1)[0]
        if kappa > -p:
            tail = y[-1] * math.exp(-p * t_max) / (p + kappa)
            tail_err = 0.1 * abs(tail)
    fitted = tail != 0.0 or y[-1] == 0.0
    if p * t_max < 20 and not fitted:
        raise HorizonError(f"t_max={t_max:g} too short for p={p:g}; need t_max >= {20.0 / p:g}")
    value = body + tail
    err = quad_err + tail_err
    if return_error:
        return value, err
    return value


@dataclass(frozen=True)
class KMRow:
    p: float
    lhs: float
    rhs: float
    rel_diff: float


def km_crosscheck(r: SCRates, p_list, N_trunc: int = 200, t_max: float = 40.0,
                  dt: float = 1e-3, method: str = "expm") -> list[KMRow]:
    """Laplace transform of the ODE ``P_00`` against ``-S(-p)`` from the D-ratio."""
    traj = solve_kolmogorov(r, N_trunc, t_max, dt, method)
    rows = []
    for p in p_list:
        lhs = laplace_p00(traj, p)
        s = stieltjes_S(r, -p)
        rhs = -s.value.real
        rows.append(KMRow(p, lhs, rhs, abs(lhs - rhs) / abs(rhs)))
    return rows


def generating_function(state: BDState, theta: float) -> float:
    """``sqrt(1 - k2 w) sum_n P_0n (1+c)_n/(1/2+c)_n w^(n+c)`` at ``w = sn^2 theta``."""
    r = state.r
    jt = jacobi(theta, r.k2)
    w = jt.sn ** 2
    n = np.arange(state.probs.size)
    # (1+c)_n / (1/2+c)_n without overflowing either Pochhammer symbol
    weights = np.concatenate([[1.0], np.cumprod((1.0 + r.c + n[:-1]) / (0.5 + r.c + n[:-1]))])
    return float(jt.dn * w ** r.c * np.sum(state.probs * weights * w ** n))


def generating_bound(r: SCRates, theta: float) -> float:
    """``dn(theta) (sn^2 theta)^c 2F1(1, 1+c; 1/2+c; sn^2 theta)``."""
    jt = jacobi(theta, r.k2)
    w = jt.sn ** 2
    return float(jt.dn * w ** r.c * hyp2f1_series(1.0, 1.0 + r.c, 0.5 + r.c, w).real)
