"""Command-line front end.

Exit codes: 0 success, 1 numerical failure or tolerance breach, 2 usage or
validation error. Output goes to stdout as JSON (sorted keys) or CSV; the
same inputs always produce the same bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .birthdeath import HorizonError, StepSizeError, laplace_p00, solve_kolmogorov
from .closed_forms import FamilyDomainError, eval_family, get_family, limit_c0
from .config import ConfigError, load_config
from .elliptic import EllipticDomainError
from .heun_core import ParameterError, TruncationError, assoc_eval, heun
from .quadrature import QuadratureError
from .stieltjes import (ContinuedFractionError, SCRates, SpectralDomainError, cf_markov,
                        stieltjes_S)
from .suites import SUITES, run_suite, worst
from .transforms import TransformDomainError, transform_first, transform_second

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
KM_TOL = 1e-3

USAGE_ERRORS = (ParameterError, ConfigError, FamilyDomainError, TransformDomainError,
                SpectralDomainError, EllipticDomainError, HorizonError)
NUMERIC_ERRORS = (TruncationError, QuadratureError, ContinuedFractionError, StepSizeError,
                  ArithmeticError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clean(x):
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def emit(rows, fmt: str, out=None) -> None:
    """Write a dict or a list of flat dicts as JSON or CSV."""
    out = out or sys.stdout
    if fmt == "json":
        if isinstance(rows, dict):
            payload = {k: _clean(v) if not isinstance(v, dict) else v for k, v in rows.items()}
        else:
            payload = [{k: _clean(v) for k, v in r.items()} for r in rows]
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return
    rows = [rows] if isinstance(rows, dict) else rows
    buf = io.StringIO()
    if rows:
        flat = []
        for r in rows:
            r = {k: _clean(v) for k, v in r.items()}
            flat.append({k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else
                             repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        writer = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
    out.write(buf.getvalue())


def _add_heun_args(p, assoc: bool):
    for name in ("alpha", "beta", "gamma", "delta", "eps", "s", "k2"):
        p.add_argument(f"--{name}", type=float, required=True)
    if assoc:
        p.add_argument("--c", type=float, default=0.0)
        p.add_argument("--mu", type=float, default=0.0)


def _params(args):
    return heun(args.alpha, args.beta, args.gamma, args.delta, args.eps, args.s, args.k2,
                c=getattr(args, "c", 0.0), mu=getattr(args, "mu", 0.0))


def cmd_eval(args, cfg):
    A = _params(args)
    A.validate_series()
    res = assoc_eval(A, args.w, cfg.series_tol, cfg.r_max)
    emit({"w": args.w, "value": res.value, "N": res.N, "tail": res.tail,
          "params": A.as_dict()}, cfg.output_format)
    return EXIT_OK


def cmd_closed_form(args, cfg):
    spec = get_family(args.family)
    rows = []
    for w in sorted(args.w):
        A = spec.params(args.c, args.mu, args.sigma, args.k2)
        series = assoc_eval(A, w, cfg.series_tol, cfg.r_max).value
        if args.c == 0.0:
            closed = limit_c0(spec, args.mu, args.sigma, w, args.k2, tol=cfg.quad_tol)
        else:
            closed = eval_family(spec, args.c, args.mu, args.sigma, w, args.k2, tol=cfg.quad_tol)
        rows.append({"w": w, "series_value": series, "closed_form_value": closed,
                     "abs_diff": abs(series - closed)})
    emit(rows, cfg.output_format)
    return EXIT_OK


def cmd_transform(args, cfg):
    A = _params(args)
    fn = transform_first if args.kind == "first" else transform_second
    rep = fn(A, args.w, which=args.which, tol=cfg.quad_tol)
    emit(rep.as_dict(), cfg.output_format)
    return EXIT_OK


def cmd_stieltjes(args, cfg):
    r = SCRates(args.c, args.mu, args.k2)
    rows = []
    for z in args.z:
        d = stieltjes_S(r, z, tol=cfg.quad_tol)
        f = cf_markov(r, z, tol=cfg.cf_tol)
        rel = math.inf if d.pole else abs(d.value - f.value) / abs(f.value)
        rows.append({"z_re": z.real, "z_im": z.imag,
                     "S_d_ratio_re": d.value.real, "S_d_ratio_im": d.value.imag,
                     "S_cf_re": f.value.real, "S_cf_im": f.value.imag,
                     "rel_diff": rel, "pole": d.pole})
    rows.sort(key=lambda r: (r["z_re"], r["z_im"]))
    emit(rows, cfg.output_format)
    return EXIT_OK


def cmd_bd_check(args, cfg):
    r = SCRates(args.c, args.mu, args.k2)
    traj = solve_kolmogorov(r, cfg.N_trunc, cfg.t_max, cfg.dt, method=cfg.bd_method)
    if args.trajectory_csv:
        with open(args.trajectory_csv, "w") as fh:
            fh.write(traj.to_csv())
    rows = []
    for p in sorted(args.p):
        lhs = laplace_p00(traj, p)
        rhs = -stieltjes_S(r, -p, tol=cfg.quad_tol).value.real
        rows.append({"p": p, "lhs": lhs, "rhs": rhs, "rel_diff": abs(lhs - rhs) / abs(rhs)})
    emit(rows, cfg.output_format)
    return EXIT_OK if all(row["rel_diff"] < KM_TOL for row in rows) else EXIT_NUMERIC


def cmd_verify(args, cfg):
    results = run_suite(args.suite, cfg, workers=args.workers)
    emit([r.row() for r in results], cfg.output_format)
    bad = [r for r in results if not r.passed]
    w = worst(results)
    print(f"verify {args.suite}: {len(results) - len(bad)}/{len(results)} cases pass; "
          f"worst {w.row()['case']} diff={w.diff:.3g} tol={w.tol:g}", file=sys.stderr)
    return EXIT_NUMERIC if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # shared options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON config file (keys as in RunConfig)")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"),
                        default=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS,
                        help="worker processes for sweeps")
    parser = _Parser(prog="assocheun", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _orig_add = sub.add_parser

    def add_parser(name, **kw):
        return _orig_add(name, parents=[common], **kw)
    sub.add_parser = add_parser

    p = sub.add_parser("eval", help="Heun function by power series")
    _add_heun_args(p, assoc=False)
    p.add_argument("--w", type=float, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("assoc-eval", help="associated Heun function by power series")
    _add_heun_args(p, assoc=True)
    p.add_argument("--w", type=float, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("closed-form", help="closed-form family against the series")
    p.add_argument("--family", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--w", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("transform", help="integral transform identity")
    p.add_argument("--kind", choices=("first", "second"), default="first")
    p.add_argument("--which", choices=("alpha", "beta"), default="alpha")
    _add_heun_args(p, assoc=True)
    p.add_argument("--w", type=float, required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("stieltjes", help="Stieltjes transform by two methods")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--z", type=complex, nargs="+", required=True)
    p.set_defaults(func=cmd_stieltjes)

    p = sub.add_parser("bd-check", help="birth-death ODE against the Stieltjes transform")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--p", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0])
    p.add_argument("--N-trunc", dest="N_trunc", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--method", dest="bd_method", choices=("expm", "rk4"))
    p.add_argument("--trajectory-csv", help="also write (t, p00) to this file")
    p.set_defaults(func=cmd_bd_check)

    p = sub.add_parser("verify", help="run an invariant grid")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(getattr(args, "config", None))
        cfg = cfg.override(**{k: getattr(args, k, None) for k in
                              ("output_format", "N_trunc", "t_max", "dt", "bd_method")})
        args.workers = getattr(args, "workers", 1)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        return args.func(args, cfg)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
