"""Built-in Cauchy data used by the tests, scripts and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .fields import CauchyData, GridFunction, TangentVector, make_cauchy_data

BUILTIN_NAMES = ("vacuum", "cos_perturbation", "random_smooth")
MAX_GRID = 1 << 14


def vacuum(period: float = 1.0, n: int = 256) -> CauchyData:
    z = np.zeros(n)
    return make_cauchy_data(period, z, z)


def cos_perturbation(eps_u: float, eps_uy: float, mode: int = 1, period: float = 1.0,
                     n: int = 256) -> CauchyData:
    """u = eps_u cos(2 pi m x / p), u_y = eps_uy sin(2 pi m x / p)."""
    x = np.arange(n) * (period / n)
    arg = 2 * np.pi * mode * x / period
    return make_cauchy_data(period, eps_u * np.cos(arg), eps_uy * np.sin(arg))


def random_smooth(seed: int, period: float = 1.0, n: int = 256, modes: int = 8,
                  amplitude: float = 0.2, decay: float = 0.5) -> CauchyData:
    """Real random trigonometric polynomials; mode k has standard deviation amplitude * decay^(k-1).

    The generator is numpy's PCG64 seeded with ``seed``, so the data is
    reproducible bit for bit.
    """
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((2, 2, modes)) * amplitude * decay ** np.arange(modes)
    if 2 * modes >= n:
        raise ConfigError(f"grid size {n} cannot resolve {modes} modes")
    x = np.arange(n) * (period / n)
    k = np.arange(1, modes + 1)
    arg = 2 * np.pi * np.outer(x, k) / period
    fields = [np.cos(arg) @ c[0] + np.sin(arg) @ c[1] for c in coeffs]
    return make_cauchy_data(period, fields[0], fields[1])


def builtin_data(name: str, params: dict | None = None, period: float = 1.0, n: int = 256) -> CauchyData:
    """Build a named datum; doubles n until the Fourier tail is below the smoothness threshold."""
    params = dict(params or {})
    if name not in BUILTIN_NAMES:
        raise ConfigError(f"unknown builtin data '{name}', expected one of {BUILTIN_NAMES}")
    while True:
        try:
            if name == "vacuum":
                cd = vacuum(period, n)
            elif name == "cos_perturbation":
                cd = cos_perturbation(float(params.get("eps_u", params.get("eps1", 0.0))),
                                      float(params.get("eps_uy", params.get("eps2", 0.0))),
                                      int(params.get("mode", 1)), period, n)
            else:
                cd = random_smooth(int(params.get("seed", 0)), period, n,
                                   int(params.get("modes", 8)), float(params.get("amplitude", 0.2)),
                                   float(params.get("decay", 0.5)))
        except TypeError as exc:
            raise ConfigError(f"bad parameters for '{name}': {exc}") from None
        if cd.smooth or n >= MAX_GRID:
            return cd
        n *= 2


def load_samples(path, period: float) -> CauchyData:
    """Read a samples file: JSON {"u": [[re, im], ...], "u_y": [...]} or two GridFunction blobs."""
    import json

    try:
        with open(path) as fh:
            blob = json.load(fh)
        u = GridFunction.from_json(json.dumps(blob["u"])) if isinstance(blob["u"], dict) else None
        if u is not None:
            uy = GridFunction.from_json(json.dumps(blob["u_y"]))
            return CauchyData(u, uy)
        to_c = lambda rows: np.array([complex(r[0], r[1]) if isinstance(r, list) else complex(r)  # noqa: E731
                                      for r in rows])
        return make_cauchy_data(float(blob.get("period", period)), to_c(blob["u"]), to_c(blob["u_y"]))
    except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"cannot read samples file {path}: {exc}") from None


def random_tangent(cd: CauchyData, seed: int, modes: int = 4, amplitude: float = 1.0) -> TangentVector:
    """Smooth periodic tangent vector (du, du_y) with seeded real Fourier coefficients."""
    rng = np.random.default_rng(seed)
    n, p = cd.grid_size, cd.period
    coeffs = rng.standard_normal((2, 2, modes + 1)) * amplitude * 0.5 ** np.arange(modes + 1)
    x = np.arange(n) * (p / n)
    k = np.arange(modes + 1)
    arg = 2 * np.pi * np.outer(x, k) / p
    du, duy = (np.cos(arg) @ c[0] + np.sin(arg) @ c[1] for c in coeffs)
    return TangentVector(GridFunction(p, du), GridFunction(p, duy))
