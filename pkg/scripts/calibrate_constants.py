#!/usr/bin/env python3
"""Fit the constants in front of delta d and of the Darboux sum over the cos_perturbation family.

Prints the fitted constants, the per-sample spread and the printed values
they replace.  Usage: python3 scripts/calibrate_constants.py [--eps 0.1 0.2 0.3]
"""
import argparse
import json

from sinhg.corpus import builtin_data, random_tangent
from sinhg.darboux import calibrate_constants, divisor_frame, sample_tables
from sinhg.spectral import Annulus, find_divisor


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.2, 0.3])
    ap.add_argument("--points", type=int, default=4)
    ap.add_argument("--tangents", type=int, default=3)
    args = ap.parse_args()

    tables = []
    for eps in args.eps:
        cd = builtin_data("cos_perturbation", {"eps_u": eps})
        pts = find_divisor(cd, Annulus(0.005, 200.0))[: args.points]
        frames = [divisor_frame(cd, p) for p in pts]
        tangents = [random_tangent(cd, s) for s in range(args.tangents)]
        tables.append(sample_tables(cd, frames, tangents))
        print(f"eps_u={eps}: {len(frames)} divisor points at",
              ", ".join(f"{p.lambda_i:.6g}" for p in pts))
    cal = calibrate_constants(tables)
    print(json.dumps(cal.to_dict(), indent=1))


if __name__ == "__main__":
    main()
