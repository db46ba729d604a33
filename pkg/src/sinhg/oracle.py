"""Closed forms for the vacuum u = u_y = 0.

There U_lambda is constant with U^2 = -nu^2 I, nu^2 = (1 + lambda)(1 + 1/lambda)/4,
so F(x) = cos(x nu) I + sin(x nu)/nu U.
"""

from __future__ import annotations

import math

import numpy as np

from .lax import u_from_values


def nu_squared(lam):
    lam = np.asarray(lam, dtype=complex)
    return (1 + lam) * (1 + 1 / lam) / 4


def _cos_sinc(x, lam):
    """cos(x nu) and sin(x nu)/nu as entire functions of nu^2."""
    nu = np.sqrt(nu_squared(lam))
    small = np.abs(nu) < 1e-8
    safe = np.where(small, 1.0, nu)
    sinc = np.where(small, x * (1 - (x * nu) ** 2 / 6), np.sin(x * safe) / safe)
    return np.cos(x * nu), sinc


def vacuum_frame(x, lam) -> np.ndarray:
    cos_, sinc = _cos_sinc(x, lam)
    U = u_from_values(0.0, 0.0, np.asarray(lam, dtype=complex))
    return cos_[..., None, None] * np.eye(2) + sinc[..., None, None] * U


def vacuum_monodromy(lam, period: float = 1.0) -> np.ndarray:
    return vacuum_frame(period, lam)


def vacuum_discriminant(lam, period: float = 1.0):
    return 2 * _cos_sinc(period, lam)[0]


def vacuum_phi(x, lam) -> np.ndarray:
    """phi(x) = F(x)^{-1} e2 = exp(-x U) e2, shape x.shape + (2,)."""
    cos_, sinc = _cos_sinc(np.asarray(x, dtype=float), lam)
    U = u_from_values(0.0, 0.0, complex(lam))
    return cos_[..., None] * np.array([0, 1]) - sinc[..., None] * U[:, 1]


def vacuum_divisor(r_min: float, r_max: float, period: float = 1.0) -> list[tuple[complex, complex]]:
    """(lambda, mu) for all zeros of b with r_min <= |lambda| <= r_max, sorted by |lambda|.

    lambda = -1 has mu = 1; for k >= 1 the pair solving
    lambda^2 + (2 - 4 k^2 pi^2 / p^2) lambda + 1 = 0 has mu = (-1)^k.
    """
    out = []
    if r_min <= 1 <= r_max:
        out.append((-1 + 0j, 1 + 0j))
    k = 1
    while True:
        s = 4 * k * k * math.pi ** 2 / period ** 2 - 2  # lambda + 1/lambda
        big = (s + math.sqrt(s * s - 4)) / 2
        small = 1 / big
        if small < r_min and big > r_max:
            break
        mu = complex((-1) ** k)
        for root in (small, big):
            if r_min <= root <= r_max:
                out.append((complex(root), mu))
        k += 1
    out.sort(key=lambda z: (abs(z[0]), math.atan2(z[0].imag, z[0].real)))
    return out


def oracle_table(lams, period: float = 1.0):
    """Rows (lambda, Delta, b) of the closed form."""
    lams = np.asarray(lams, dtype=complex)
    M = vacuum_monodromy(lams, period)
    return lams, M[..., 0, 0] + M[..., 1, 1], M[..., 0, 1]
