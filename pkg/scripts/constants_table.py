"""Sharp constants for pairs of unit l_p balls, both closed forms.

    python scripts/constants_table.py --dims 2 3 4
"""
import argparse
import itertools

from sharpness_lab import convex_geometry as cg
from sharpness_lab.convex_geometry import INF, LpBall
from sharpness_lab.polynomials import closed_form_constant_310


def fmt(mu):
    return "inf" if mu == INF else f"{mu:g}"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--exps", type=float, nargs="+", default=[1, 1.5, 2, 3, INF])
    args = ap.parse_args()
    print(f"{'mu':>5} {'lam':>5} {'m':>3} {'M(V_mu,V_lam)':>14} {'M(V_mu,V_lam*)':>15} method")
    for mu, lam, m in itertools.product(args.exps, args.exps, args.dims):
        K, V = LpBall(mu, m, 1.0), LpBall(lam, m, 1.0)
        wc = cg.sharp_constant(K, V)
        w310, _ = closed_form_constant_310(mu, lam, m)
        print(f"{fmt(mu):>5} {fmt(lam):>5} {m:>3} {wc.value:14.9g} {w310:15.9g} {wc.method}")


if __name__ == "__main__":
    main()
