"""Three-root region over a log grid in (c, d), with the threshold curves alongside.

    python scripts/region_scan.py [--steps 40] [--out region.csv]
"""
import argparse
import csv
import sys

import numpy as np

from ivtree.fixedpoint import thresholds
from ivtree.sweep import Axis, SweepSpec, rows_to_csv, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--out", default="region.csv")
    ap.add_argument("--curves", default="thresholds.csv")
    args = ap.parse_args()

    spec = SweepSpec("reduced", {"c": Axis(0.01, 5, args.steps, "log"), "d": Axis(1, 20, args.steps, "log")},
                     outputs=frozenset({"roots", "region"}))
    rows = list(run_sweep(spec))
    with open(args.out, "w") as fh:
        fh.write(rows_to_csv(rows))

    with open(args.curves, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "eta1", "eta2"])
        for d in np.geomspace(3.0 + 1e-6, 20.0, 200):
            w.writerow([repr(float(d)), *map(repr, thresholds(float(d)))])

    n3 = sum(r.num_roots == 3 for r in rows)
    print(f"{len(rows)} grid points, {n3} with three fixed points; min d among them = "
          f"{min((r.d for r in rows if r.num_roots == 3), default=float('nan')):.4g}", file=sys.stderr)


if __name__ == "__main__":
    main()
