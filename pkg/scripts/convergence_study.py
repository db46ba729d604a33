#!/usr/bin/env python3
"""Residuals of the basic identities and of the symplectic basis as the grid is refined."""
import argparse

from sinhg.corpus import builtin_data
from sinhg.darboux import divisor_frame, verify_basic_identities, verify_symplectic_basis
from sinhg.spectral import Annulus, find_divisor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--grid", type=int, nargs="+", default=[64, 128, 256])
    args = ap.parse_args()

    print(f"{'N':>5}  {'basic':>9}  {'symplectic':>10}")
    for n in args.grid:
        cd = builtin_data("random_smooth", {"seed": args.seed}, n=n)
        basic = verify_basic_identities(cd, 0.7 + 0.2j).worst()
        frames = [divisor_frame(cd, p) for p in find_divisor(cd, Annulus(0.005, 200.0))[:4]]
        sym = verify_symplectic_basis(cd, frames).worst()
        print(f"{n:5d}  {basic:9.2e}  {sym:10.2e}")


if __name__ == "__main__":
    main()
