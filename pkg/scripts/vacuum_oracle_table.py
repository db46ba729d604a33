#!/usr/bin/env python3
"""Compare the integrated vacuum monodromy with its closed form on a ring of lambdas."""
import argparse

import numpy as np

from sinhg.corpus import vacuum
from sinhg.oracle import vacuum_monodromy
from sinhg.settings import IntegratorSettings
from sinhg.transfer import monodromy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--radius", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    args = ap.parse_args()

    lams = np.concatenate([r * np.exp(2j * np.pi * (np.arange(12) + 0.5) / 12) for r in args.radius])
    ref = vacuum_monodromy(lams)
    scale = np.maximum(1.0, np.abs(ref).max(axis=(-2, -1)))
    print(f"{'N':>5} {'substeps':>8}  max relative error")
    for n in args.grid:
        cd = vacuum(n=n)
        for sub in (1, 2, 4):
            M = monodromy(cd, lams, IntegratorSettings(substeps=sub))
            err = (np.abs(M - ref).max(axis=(-2, -1)) / scale).max()
            print(f"{n:5d} {sub:8d}  {err:.3e}")


if __name__ == "__main__":
    main()
