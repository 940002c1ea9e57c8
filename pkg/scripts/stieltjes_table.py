"""Stieltjes transform by the elliptic D-ratio and by the continued fraction.

Also reports the moment (Laurent) approximation and the total-mass limit.
"""

import argparse

import numpy as np

from assocheun.stieltjes import SCRates, cf_markov, laurent_tail, moments_jacobi, stieltjes_S


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=0.75)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--k2", type=float, default=0.5)
    args = ap.parse_args(argv)
    r = SCRates(args.c, args.mu, args.k2)
    m = moments_jacobi(r, 3)

    print(f"{'p':>10} {'-S_d(-p)':>22} {'-S_cf(-p)':>22} {'rel':>9} {'laurent J=3':>14}")
    for p in np.geomspace(0.1, 1e4, 11):
        d = -stieltjes_S(r, -p).value.real
        f = -cf_markov(r, -p).value.real
        lt = laurent_tail(m, p, 3) if p >= 50 else float("nan")
        print(f"{p:10.4g} {d:22.16g} {f:22.16g} {abs(d - f) / f:9.1e} {lt:14.8g}")
    p = 1e4
    print(f"total mass check p*(-S(-p)) at p=1e4: {p * -stieltjes_S(r, -p).value.real:.6f}")


if __name__ == "__main__":
    main()
