"""Lattice-rounded extremal pairs: how close sup|grad f|/|f| gets to sigma*M.

    python scripts/asymptotic_table.py --sigmas 5 10 20 40 80
"""
import argparse

from sharpness_lab import convex_geometry as cg
from sharpness_lab.convex_geometry import INF, LpBall
from sharpness_lab.exp_type import asymptotic_sharpness

PAIRS = {
    "disk/disk": (LpBall(2.0, 2, 1.0), LpBall(2.0, 2, 1.0)),
    "l1/disk": (LpBall(1.0, 2, 1.0), LpBall(2.0, 2, 1.0)),
    "disk/square": (LpBall(2.0, 2, 1.0), LpBall(INF, 2, 1.0)),
    "l1.5/l3 (m=3)": (LpBall(1.5, 3, 1.0), LpBall(3.0, 3, 1.0)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigmas", type=float, nargs="+", default=[5, 10, 20, 40, 80])
    args = ap.parse_args()
    for name, (K, V) in PAIRS.items():
        print(f"K={cg.describe(K)} V={cg.describe(V)} ({name})")
        print(f"  {'sigma':>6} {'k0':>14} {'ratio':>12} {'defect':>10} {'ratio/sigma':>12}")
        for row in asymptotic_sharpness(K, V, args.sigmas):
            k0 = ",".join(map(str, row["k0"]))
            print(f"  {row['sigma']:6g} {k0:>14} {row['ratio']:12.6f} {row['defect']:10.6f} "
                  f"{row['normalized']:12.6f}")
        print(f"  M = {row['M']:.9g}")


if __name__ == "__main__":
    main()
