"""Cached corpus, divisor frames and calibration tables shared by the test modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from sinhg.corpus import builtin_data, random_tangent
from sinhg.darboux import divisor_frame, sample_tables
from sinhg.spectral import Annulus, find_divisor

# window holding at least four divisor points for every datum below
WINDOW = Annulus(0.005, 200.0)

DATA = {
    "vacuum": ("vacuum", {}),
    "cos": ("cos_perturbation", {"eps_u": 0.3, "eps_uy": 0.1}),
    "rs1": ("random_smooth", {"seed": 1}),
    "rs2": ("random_smooth", {"seed": 2}),
    "rs3": ("random_smooth", {"seed": 3}),
}

EPS_FAMILY = (0.1, 0.2, 0.3)

PROBE_LAMBDAS = (0.7, 1.3, complex(0.6, 0.8), complex(-0.8, 0.6), 2.0)
PAIRS = ((0.7, 1.3), (complex(0.6, 0.8), 2.0), (complex(-0.8, 0.6), 0.7))


@lru_cache(maxsize=None)
def data(key: str, n: int = 256):
    name, params = DATA[key]
    return builtin_data(name, params, n=n)


@lru_cache(maxsize=None)
def eps_data(eps: float, n: int = 256):
    return builtin_data("cos_perturbation", {"eps_u": eps}, n=n)


@lru_cache(maxsize=None)
def points(cd, count: int = 4):
    return tuple(find_divisor(cd, WINDOW)[:count])


@lru_cache(maxsize=None)
def frames(cd, count: int = 4):
    return tuple(divisor_frame(cd, p) for p in points(cd, count))


@lru_cache(maxsize=None)
def tangents(cd, count: int = 3, offset: int = 0):
    return tuple(random_tangent(cd, offset + s) for s in range(count))


@lru_cache(maxsize=None)
def eps_tables():
    out = []
    for eps in EPS_FAMILY:
        cd = eps_data(eps)
        out.append(sample_tables(cd, list(frames(cd)), list(tangents(cd))))
    return tuple(out)


ACCEPTANCE_LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def rel(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / max(1e-300, np.max(np.abs(b))))
