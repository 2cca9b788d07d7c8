"""Run the standard verification campaigns and write JSON and CSV reports.

    SHARPNESS_LAB_THREADS=4 python scripts/run_campaigns.py --out reports --trials 50
"""
import argparse
import json
import time
from pathlib import Path

from sharpness_lab.harness import run_campaign

CAMPAIGNS = [
    {"campaign": "duality", "ids": ["1.2", "1.2a"], "m": 3, "classes": ["lp", "hrep", "vrep"]},
    {"campaign": "bernstein-2d", "ids": ["2.4", "2.8", "2.9"], "m": 2,
     "classes": ["lp", "hrep", "vrep"], "sigma": 3.0},
    {"campaign": "bernstein-3d", "ids": ["2.8", "2.9"], "m": 3, "sigma": 2.0},
    {"campaign": "markov-2d", "ids": ["3.1", "3.3"], "m": 2, "classes": ["lp", "hrep", "vrep"],
     "degree": 4},
    {"campaign": "markov-ball", "ids": ["3.2"], "m": 3, "degree": 3},
    {"campaign": "weighted", "ids": ["3.7"], "m": 3, "degree": 2},
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="reports")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--resolution", type=int, default=64)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    total_fail = 0
    for desc in CAMPAIGNS:
        desc = dict(desc, trials=args.trials, seed=args.seed, resolution=args.resolution)
        t0 = time.perf_counter()
        report = run_campaign(desc)
        name = desc["campaign"]
        (out / f"{name}.json").write_text(report.to_json() + "\n")
        (out / f"{name}.csv").write_text(report.to_csv())
        s = report.summary()
        total_fail += s["failures"]
        print(f"{name:<14} {json.dumps(s)}  {time.perf_counter() - t0:.1f}s")
    raise SystemExit(1 if total_fail else 0)


if __name__ == "__main__":
    main()
