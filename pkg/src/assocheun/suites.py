"""Invariant grids behind ``assocheun verify``.

Each suite expands into a list of independent cases. A case is a plain tuple
(picklable, so it can be sent to a worker process) and evaluates to a
:class:`CaseResult`. Results are sorted by case key before reporting, so the
output does not depend on the number of workers.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .birthdeath import generating_bound, generating_function, laplace_p00, solve_kolmogorov
from .closed_forms import FAMILIES, closed_form_value
from .config import RunConfig
from .heun_core import Hn, heun
from .stieltjes import SCRates, cf_markov, d_integral, numerator_direct, stieltjes_S
from .transforms import transform_first, transform_second

CLOSED_FORM_TOL = 1e-6
TRANSFORM_TOL = 1e-8
STIELTJES_TOL = 1e-6
NUMERATOR_TOL = 1e-10
KM_TOL = 1e-3

CF_C = (0.3, 0.75, 1.2)
CF_MU = (0.0, 0.5)
CF_SIGMA = (-0.5, 0.25, 1.0)
CF_W = (0.1, 0.3, 0.6)
CF_K2 = (0.25, 0.64)

# (alpha, gamma, delta, eps, s, c, mu); beta follows from the Fuchs relation.
# Every row sits inside both validity strips for alpha.
TRANSFORM_SETS = (
    (0.3, 0.9, 0.5, 0.6, 0.2, 0.4, 0.1),
    (0.5, 1.2, 0.3, 0.4, -0.3, 0.5, 0.0),
    (-0.2, 0.6, 0.7, 0.5, 0.5, 0.5, 0.5),
)
TRANSFORM_W = (0.2, 0.5, 0.8)
TRANSFORM_K2 = (0.25, 0.5, 0.81)

ST_Z = (-0.5, -1.0, -5.0, -10.0)
ST_C = (0.6, 0.75, 1.5)
ST_MU = (0.0, 1.0)
ST_K2 = (0.25, 0.5, 0.81)

BD_RATES = ((0.75, 0.0, 0.5), (0.75, 1.0, 0.5))
BD_P = (0.5, 1.0, 2.0, 5.0)
BD_SNAP_T = (0.1, 1.0, 5.0)
BD_THETA = (0.3, 0.8, 1.2)


@dataclass(frozen=True)
class CaseResult:
    key: tuple
    values: dict
    diff: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.diff <= self.tol)

    def row(self) -> dict:
        out = {"case": "/".join(str(k) for k in self.key)}
        out.update(self.values)
        out.update(diff=self.diff, tol=self.tol, passed=self.passed)
        return out


def transform_params(row, k2):
    a, g, d, e, s, c, mu = row
    return heun(a, g + d + e - 1.0 - a, g, d, e, s, k2, c=c, mu=mu)


# -- case builders -----------------------------------------------------------

def closed_form_cases(cfg: RunConfig):
    for fid, c, mu, sg, w, k2 in itertools.product(FAMILIES, CF_C, CF_MU, CF_SIGMA, CF_W, CF_K2):
        yield ("closed-forms", fid, c, mu, sg, w, k2)


def transform_cases(cfg: RunConfig):
    for kind, which in (("first", "alpha"), ("first", "beta"), ("second", "alpha"),
                        ("second", "beta")):
        for i, w, k2 in itertools.product(range(len(TRANSFORM_SETS)), TRANSFORM_W, TRANSFORM_K2):
            A = transform_params(TRANSFORM_SETS[i], k2)
            a = A.base.alpha if which == "alpha" else A.base.beta
            upper = A.base.gamma if kind == "first" else 1.0
            if upper > a > -A.c:
                yield ("transforms", kind, which, i, w, k2)


def stieltjes_cases(cfg: RunConfig):
    for c, mu, k2, z in itertools.product(ST_C, ST_MU, ST_K2, ST_Z):
        yield ("stieltjes", c, mu, k2, z)
    for c, k2, z in itertools.product(ST_C, ST_K2, ST_Z):
        yield ("numerator", c, k2, z)


def bd_cases(cfg: RunConfig):
    for c, mu, k2 in BD_RATES:
        yield ("bd", c, mu, k2)


SUITES = {
    "closed-forms": closed_form_cases,
    "transforms": transform_cases,
    "stieltjes": stieltjes_cases,
    "bd": bd_cases,
}


# -- case evaluation ---------------------------------------------------------

def _run_closed_form(case, cfg):
    _, fid, c, mu, sg, w, k2 = case
    spec = FAMILIES[fid]
    series = spec.prefactor(w, c, k2) * Hn(spec.params(c, mu, sg, k2), w, cfg.series_tol,
                                           cfg.r_max)
    quad = closed_form_value(spec, c, mu, sg, w, k2, tol=cfg.quad_tol)
    return [CaseResult(case[1:], {"series": series, "closed_form": quad},
                       abs(series - quad), CLOSED_FORM_TOL)]


def _run_transform(case, cfg):
    _, kind, which, i, w, k2 = case
    A = transform_params(TRANSFORM_SETS[i], k2)
    fn = transform_first if kind == "first" else transform_second
    rep = fn(A, w, which=which, tol=cfg.quad_tol)
    values = {"lhs": rep.lhs, "rhs": rep.rhs}
    if kind == "second":
        a = A.base.alpha if which == "alpha" else A.base.beta
        # output association parameter must be exactly c + a - 1
        values["c_out_exact"] = rep.params_out.c == A.c + (a - 1.0)
        if not values["c_out_exact"]:
            return [CaseResult(case[1:], values, float("inf"), TRANSFORM_TOL)]
    return [CaseResult(case[1:], values, rep.abs_diff, TRANSFORM_TOL)]


def _run_stieltjes(case, cfg):
    if case[0] == "numerator":
        _, c, k2, z = case
        direct = numerator_direct(c, z, k2, tol=cfg.quad_tol)
        via_d = d_integral(c + 1.0, 0.0, z, k2, tol=cfg.quad_tol)
        rel = abs(direct - via_d) / abs(via_d)
        return [CaseResult(case, {"direct": direct.real, "d_form": via_d.real}, rel,
                           NUMERATOR_TOL)]
    _, c, mu, k2, z = case
    r = SCRates(c, mu, k2)
    d = stieltjes_S(r, z, tol=cfg.quad_tol)
    f = cf_markov(r, z, tol=cfg.cf_tol)
    rel = abs(d.value - f.value) / abs(f.value)
    return [CaseResult(case, {"S_d_ratio": d.value.real, "S_cf": f.value.real}, rel,
                       STIELTJES_TOL)]


def _run_bd(case, cfg):
    _, c, mu, k2 = case
    r = SCRates(c, mu, k2)
    # solve_kolmogorov raises StepSizeError if probabilities leave [0, 1]
    traj = solve_kolmogorov(r, cfg.N_trunc, cfg.t_max, cfg.dt, method=cfg.bd_method,
                            snapshot_times=BD_SNAP_T)
    out = []
    for p in BD_P:
        lhs = laplace_p00(traj, p)
        rhs = -stieltjes_S(r, -p, tol=cfg.quad_tol).value.real
        out.append(CaseResult((c, mu, k2, "laplace", p), {"lhs": lhs, "rhs": rhs},
                              abs(lhs - rhs) / abs(rhs), KM_TOL))
    for st in traj.snapshots:
        for th in BD_THETA:
            h = generating_function(st, th)
            b = generating_bound(r, th)
            # violation measured as distance outside [0, bound]
            viol = max(0.0, -h, h - b)
            out.append(CaseResult((c, mu, k2, "bound", st.t, th), {"H": h, "bound": b},
                                  viol, 0.0))
    return out


_RUNNERS = {"closed-forms": _run_closed_form, "transforms": _run_transform,
            "stieltjes": _run_stieltjes, "numerator": _run_stieltjes, "bd": _run_bd}


def run_case(case, cfg: RunConfig) -> list[CaseResult]:
    return _RUNNERS[case[0]](case, cfg)


def _run_star(args):
    return run_case(*args)


def run_suite(name: str, cfg: RunConfig, workers: int = 1) -> list[CaseResult]:
    """Evaluate every case of a suite; ordering is by case key regardless of ``workers``."""
    if name not in SUITES:
        raise KeyError(name)
    cases = list(SUITES[name](cfg))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_star, [(c, cfg) for c in cases], chunksize=8))
    else:
        chunks = [run_case(c, cfg) for c in cases]
    results = [r for chunk in chunks for r in chunk]
    return sorted(results, key=lambda r: tuple(map(str, r.key)))


def worst(results: list[CaseResult]) -> CaseResult:
    """Case with the largest ``diff / tol`` ratio (absolute breach when ``tol == 0``)."""
    def score(r):
        return r.diff / r.tol if r.tol > 0 else (np.inf if r.diff > 0 else 0.0)
    return max(results, key=score)
