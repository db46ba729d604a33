"""Periodic Cauchy data, grid functions and the symplectic form.

Two carriers live here. ``GridFunction`` holds a p-periodic function sampled on
N uniform nodes and uses trigonometric interpolation (spectral derivative,
trapezoid quadrature). ``PathFunction`` holds a function on the closed interval
[0, p] sampled on the N + 1 nodes x_k = k p / N; it is needed because the
Floquet-type solutions phi, psi and everything built from them are in general
not periodic, so FFT based calculus would be wrong for them. PathFunction uses
exact-rational local Lagrange stencils (order 10) for interpolation,
differentiation and quadrature.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import ConstructionError

STENCIL = 10
SMOOTHNESS_THRESHOLD = 1e-10


def _as_samples(samples) -> np.ndarray:
    arr = np.array(samples, dtype=complex)
    if arr.ndim != 1:
        raise ConstructionError(f"samples must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# exact stencil tables


def _lagrange_poly(points: list[int], j: int) -> list[Fraction]:
    """Coefficients (ascending) of the Lagrange basis polynomial l_j on integer points."""
    coeffs = [Fraction(1)]
    denom = Fraction(1)
    for i in points:
        if i == points[j]:
            continue
        new = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k] -= c * i
            new[k + 1] += c
        coeffs = new
        denom *= points[j] - i
    return [c / denom for c in coeffs]


@lru_cache(maxsize=None)
def _interval_integral_weights(m: int, offset: int) -> tuple[float, ...]:
    """Weights w_j with sum_j w_j f(j) = int_offset^{offset+1} p(t) dt, p interpolating f on 0..m-1."""
    pts = list(range(m))
    out = []
    for j in range(m):
        c = _lagrange_poly(pts, j)
        val = sum(ck * (Fraction(offset + 1) ** (k + 1) - Fraction(offset) ** (k + 1)) / (k + 1)
                  for k, ck in enumerate(c))
        out.append(float(val))
    return tuple(out)


@lru_cache(maxsize=None)
def _node_derivative_weights(m: int, at: int) -> tuple[float, ...]:
    """Weights for p'(at) where p interpolates on integer points 0..m-1."""
    pts = list(range(m))
    out = []
    for j in range(m):
        c = _lagrange_poly(pts, j)
        val = sum(k * ck * Fraction(at) ** (k - 1) for k, ck in enumerate(c) if k > 0)
        out.append(float(val))
    return tuple(out)


@lru_cache(maxsize=64)
def path_quadrature_weights(n: int, order: int = STENCIL) -> np.ndarray:
    """Quadrature weights on the n + 1 unit-spaced nodes 0..n (multiply by h)."""
    m = min(order, n + 1)
    w = np.zeros(n + 1)
    for k in range(n):
        start = min(max(k - m // 2 + 1, 0), n + 1 - m)
        w[start:start + m] += _interval_integral_weights(m, k - start)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=64)
def path_derivative_matrix(n: int, order: int = STENCIL) -> np.ndarray:
    """Dense (n+1)x(n+1) differentiation matrix on unit-spaced nodes (divide by h)."""
    m = min(order + 1, n + 1)
    D = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        start = min(max(k - m // 2, 0), n + 1 - m)
        D[k, start:start + m] = _node_derivative_weights(m, k - start)
    D.setflags(write=False)
    return D


def _equispaced_bary_weights(m: int) -> np.ndarray:
    from math import comb
    return np.array([(-1) ** j * comb(m - 1, j) for j in range(m)], dtype=float)


# ---------------------------------------------------------------------------
# carriers


class _FieldOps:
    """Shared arithmetic. Mixed periodic/path operands promote to PathFunction."""

    period: float
    samples: np.ndarray
    # make numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def _binary(self, other, op):
        if isinstance(other, (GridFunction, PathFunction)):
            _check_compatible(self, other)
            if isinstance(self, GridFunction) and isinstance(other, GridFunction):
                return GridFunction(self.period, op(self.samples, other.samples))
            return PathFunction(self.period, op(self.path_values(), other.path_values()))
        if np.isscalar(other):
            return type(self)(self.period, op(self.samples, complex(other)))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: np.subtract(b, a))

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __neg__(self):
        return type(self)(self.period, -self.samples)

    def apply(self, func):
        """Pointwise map of the samples, e.g. ``u.apply(np.exp)``."""
        return type(self)(self.period, func(self.samples))

    @property
    def n(self) -> int:
        return self.grid_size

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0


def _check_compatible(f, g):
    if f.grid_size != g.grid_size or not np.isclose(f.period, g.period, rtol=1e-14, atol=0):
        raise ConstructionError(
            f"grid mismatch: (N={f.grid_size}, p={f.period}) vs (N={g.grid_size}, p={g.period})")


@dataclass(frozen=True, eq=False)
class GridFunction(_FieldOps):
    """p-periodic complex function on N uniform nodes x_k = k p / N."""

    period: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_samples(self.samples))
        object.__setattr__(self, "period", float(self.period))
        n = self.samples.size
        if not self.period > 0:
            raise ConstructionError(f"period must be positive, got {self.period}")
        if n < 8 or n % 2:
            raise ConstructionError(f"grid size must be even and >= 8, got {n}")

    @property
    def grid_size(self) -> int:
        return self.samples.size

    @property
    def spacing(self) -> float:
        return self.period / self.grid_size

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.grid_size) * self.spacing

    def fourier_coefficients(self) -> np.ndarray:
        """c_k with f(x_j) = sum_k c_k exp(2 pi i k x_j / p), numpy FFT ordering."""
        return np.fft.fft(self.samples) / self.grid_size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        n = self.grid_size
        c = self.fourier_coefficients()
        k = np.fft.fftfreq(n, 1.0 / n)
        theta = 2 * np.pi * np.mod(x, self.period)[..., None] / self.period
        terms = c * np.exp(1j * k * theta)
        # Nyquist mode as a cosine keeps real data real between nodes
        terms[..., n // 2] = c[n // 2] * np.cos(n / 2 * theta[..., 0])
        out = terms.sum(axis=-1)
        return complex(out) if out.ndim == 0 else out

    def derivative(self) -> "GridFunction":
        n = self.grid_size
        k = np.fft.fftfreq(n, 1.0 / n)
        k[n // 2] = 0.0
        c = np.fft.fft(self.samples) * (2j * np.pi * k / self.period)
        return GridFunction(self.period, np.fft.ifft(c))

    def integral(self) -> complex:
        return complex(self.samples.sum() * self.spacing)

    def path_values(self) -> np.ndarray:
        return np.append(self.samples, self.samples[0])

    def as_path(self) -> "PathFunction":
        return PathFunction(self.period, self.path_values())

    def tail_ratio(self) -> float:
        """Largest Fourier magnitude in the top quarter of modes relative to the largest overall."""
        n = self.grid_size
        mag = np.abs(self.fourier_coefficients())
        k = np.abs(np.fft.fftfreq(n, 1.0 / n))
        top = mag.max()
        if top == 0:
            return 0.0
        return float(mag[k >= n // 4].max() / top)

    @classmethod
    def from_function(cls, func, period: float, n: int) -> "GridFunction":
        x = np.arange(n) * (period / n)
        return cls(period, func(x) * np.ones(n))

    def to_json(self) -> str:
        return json.dumps({"period": self.period,
                           "samples": [[float(z.real), float(z.imag)] for z in self.samples]})

    @classmethod
    def from_json(cls, text: str) -> "GridFunction":
        try:
            obj = json.loads(text)
            samples = [complex(re, im) for re, im in obj["samples"]]
            return cls(obj["period"], samples)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConstructionError):
                raise
            raise ConstructionError(f"malformed grid-function JSON: {exc}") from exc

    def to_csv(self, path) -> None:
        write_csv(path, self.nodes, self.samples)


@dataclass(frozen=True, eq=False)
class PathFunction(_FieldOps):
    """Function on [0, p] sampled at the N + 1 nodes x_k = k p / N, endpoints included."""

    period: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_samples(self.samples))
        object.__setattr__(self, "period", float(self.period))
        if not self.period > 0:
            raise ConstructionError(f"period must be positive, got {self.period}")
        if self.samples.size < 9:
            raise ConstructionError("a path function needs at least 9 samples")

    @property
    def grid_size(self) -> int:
        return self.samples.size - 1

    @property
    def spacing(self) -> float:
        return self.period / self.grid_size

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.grid_size + 1) * self.spacing

    @property
    def start(self) -> complex:
        return complex(self.samples[0])

    @property
    def end(self) -> complex:
        return complex(self.samples[-1])

    def __call__(self, x):
        """Local 10-point Lagrange interpolation; x is clipped to [0, p]."""
        x = np.asarray(x, dtype=float)
        n = self.grid_size
        m = min(STENCIL, n + 1)
        t = np.clip(x, 0.0, self.period) / self.spacing
        start = np.clip(np.floor(t).astype(int) - m // 2 + 1, 0, n + 1 - m)
        local = (t - start)[..., None] - np.arange(m)
        idx = start[..., None] + np.arange(m)
        vals = self.samples[idx]
        w = _equispaced_bary_weights(m)
        hit = np.isclose(local, 0.0, atol=1e-13, rtol=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = w / local
            out = (q * vals).sum(-1) / q.sum(-1)
        exact = hit.any(-1)
        if np.any(exact):
            out = np.where(exact, (vals * hit).sum(-1), out)
        return complex(out) if out.ndim == 0 else out

    def derivative(self) -> "PathFunction":
        D = path_derivative_matrix(self.grid_size)
        return PathFunction(self.period, D @ self.samples / self.spacing)

    def integral(self) -> complex:
        w = path_quadrature_weights(self.grid_size)
        return complex(w @ self.samples * self.spacing)

    def path_values(self) -> np.ndarray:
        return self.samples

    def as_path(self) -> "PathFunction":
        return self

    def to_csv(self, path) -> None:
        write_csv(path, self.nodes, self.samples)


Field = Union[GridFunction, PathFunction]


def write_csv(path, x, *columns, names=None) -> None:
    """CSV with columns x, re, im (or x, <name>_re, <name>_im, ... for several columns)."""
    names = names or ([""] if len(columns) == 1 else [f"c{i}" for i in range(len(columns))])
    header = ["x"]
    for nm in names:
        header += ["re", "im"] if nm == "" else [f"{nm}_re", f"{nm}_im"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, xk in enumerate(x):
            row = [repr(float(xk))]
            for col in columns:
                row += [repr(float(col[k].real)), repr(float(col[k].imag))]
            w.writerow(row)


# ---------------------------------------------------------------------------
# module-level calculus


def evaluate(f: Field, x):
    return f(x)


def x_derivative(f: Field) -> Field:
    return f.derivative()


def quadrature(f: Field) -> complex:
    """int_0^p f dx; trapezoid for periodic data, order-10 composite rule on a path."""
    return f.integral()


# ---------------------------------------------------------------------------
# phase space


@dataclass(frozen=True, eq=False)
class CauchyData:
    """A point (u, u_y) of the phase space of p-periodic Cauchy data."""

    u: Field
    u_y: Field

    def __post_init__(self):
        _check_compatible(self.u, self.u_y)

    @property
    def period(self) -> float:
        return self.u.period

    @property
    def grid_size(self) -> int:
        return self.u.grid_size

    @property
    def periodic(self) -> bool:
        return isinstance(self.u, GridFunction) and isinstance(self.u_y, GridFunction)

    def tail_ratio(self) -> float:
        if not self.periodic:
            return float("nan")
        return max(self.u.tail_ratio(), self.u_y.tail_ratio())

    @property
    def smooth(self) -> bool:
        return self.periodic and self.tail_ratio() < SMOOTHNESS_THRESHOLD

    def perturbed(self, t: "TangentVector", eps: complex = 1.0) -> "CauchyData":
        return CauchyData(self.u + eps * t.du, self.u_y + eps * t.du_y)

    def fingerprint(self) -> str:
        import hashlib
        h = hashlib.sha256()
        h.update(repr(self.period).encode())
        h.update(np.ascontiguousarray(self.u.samples).tobytes())
        h.update(np.ascontiguousarray(self.u_y.samples).tobytes())
        return h.hexdigest()[:16]


def make_cauchy_data(period: float, u_samples, uy_samples) -> CauchyData:
    u = np.asarray(u_samples, dtype=complex)
    uy = np.asarray(uy_samples, dtype=complex)
    if u.shape != uy.shape:
        raise ConstructionError(f"length mismatch: {u.shape} vs {uy.shape}")
    return CauchyData(GridFunction(period, u), GridFunction(period, uy))


@dataclass(frozen=True, eq=False)
class TangentVector:
    """(du, du_y); components may be periodic or path functions."""

    du: Field
    du_y: Field

    def __post_init__(self):
        _check_compatible(self.du, self.du_y)

    @property
    def period(self) -> float:
        return self.du.period

    @property
    def grid_size(self) -> int:
        return self.du.grid_size

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.du + other.du, self.du_y + other.du_y)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.du - other.du, self.du_y - other.du_y)

    def __mul__(self, s) -> "TangentVector":
        return TangentVector(self.du * s, self.du_y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(-self.du, -self.du_y)

    @classmethod
    def zeros_like(cls, cd: CauchyData) -> "TangentVector":
        z = GridFunction(cd.period, np.zeros(cd.grid_size))
        return cls(z, z)


def symplectic_form(v: TangentVector, w: TangentVector) -> complex:
    """Omega(v, w) = int_0^p (dv_u * dw_uy - dw_u * dv_uy) dx, complex bilinear."""
    _check_compatible(v.du, w.du)
    return quadrature(v.du * w.du_y - w.du * v.du_y)


def poisson_bracket(grad_f: TangentVector, grad_g: TangentVector) -> complex:
    """{f, g} = Omega(grad f, grad g)."""
    return symplectic_form(grad_f, grad_g)
