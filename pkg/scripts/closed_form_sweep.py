"""Closed-form families against the power series along a w sweep.

Writes CSV rows (family, c, mu, sigma, k2, w, series, closed_form, abs_diff).
"""

import argparse
import csv
import sys

import numpy as np

from assocheun.closed_forms import FAMILIES, closed_form_value
from assocheun.heun_core import Hn


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=0.75)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--k2", type=float, default=0.64)
    ap.add_argument("--n-w", type=int, default=9)
    ap.add_argument("--out", help="CSV path (stdout if omitted)")
    args = ap.parse_args(argv)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["family", "c", "mu", "sigma", "k2", "w", "series", "closed_form", "abs_diff"])
    worst = 0.0
    for fid, spec in FAMILIES.items():
        A = spec.params(args.c, args.mu, args.sigma, args.k2)
        for w in np.linspace(0.05, 0.85, args.n_w):
            series = spec.prefactor(w, args.c, args.k2) * Hn(A, w)
            closed = closed_form_value(spec, args.c, args.mu, args.sigma, w, args.k2)
            worst = max(worst, abs(series - closed))
            writer.writerow([fid, args.c, args.mu, args.sigma, args.k2, repr(float(w)),
                             repr(float(series)), repr(float(closed)),
                             repr(float(abs(series - closed)))])
    if args.out:
        fh.close()
    print(f"max |series - closed form| = {worst:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
