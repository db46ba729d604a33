#!/usr/bin/env python3
"""Locate the divisor of a built-in datum and print lambda, mu, class and kappa per point."""
import argparse
import json
import time

from sinhg.corpus import builtin_data
from sinhg.spectral import Annulus, SearchStats, find_divisor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default="random_smooth")
    ap.add_argument("--params", default='{"seed": 1}')
    ap.add_argument("--window", type=float, nargs=2, default=(0.005, 200.0))
    ap.add_argument("--grid", type=int, default=256)
    args = ap.parse_args()

    cd = builtin_data(args.data, json.loads(args.params), n=args.grid)
    stats = SearchStats()
    t0 = time.perf_counter()
    pts = find_divisor(cd, Annulus(*args.window), stats=stats)
    dt = time.perf_counter() - t0
    print(f"{len(pts)} points, winding {stats.winding}, {stats.cells} cells, "
          f"{stats.evaluations} evaluations, {dt:.1f} s")
    for p in pts:
        print(f"  lambda={p.lambda_i:.12g}  mu={p.mu_i:.6g}  {p.classification:11s}"
              f"  kappa={p.kappa:.6g}  |b|={p.residuals['b']:.1e}")


if __name__ == "__main__":
    main()
