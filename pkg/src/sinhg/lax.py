"""Lax matrices of the elliptic sinh-Gordon equation.

All functions accept scalar or array ``x`` and return arrays of shape
``x.shape + (2, 2)``. Matrices are plain complex numpy arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .fields import CauchyData, TangentVector


def _check_lambda(lam) -> complex:
    lam = complex(lam)
    if lam == 0:
        raise DomainError("spectral parameter must be nonzero")
    return lam


def _pack(m11, m12, m21, m22) -> np.ndarray:
    m11, m12, m21, m22 = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (m11, m12, m21, m22)))
    out = np.empty(m11.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = m11
    out[..., 0, 1] = m12
    out[..., 1, 0] = m21
    out[..., 1, 1] = m22
    return out


def u_from_values(u, uy, lam):
    """U_lambda from pointwise values of u and u_y; lam may be an array broadcasting against u."""
    eu, emu = np.exp(u), np.exp(-u)
    return 0.5 * _pack(-1j * uy, 1j * eu / lam + 1j * emu, 1j * lam * eu + 1j * emu, 1j * uy)


def dlambda_u_from_values(u, lam):
    eu = np.exp(u)
    z = np.zeros_like(eu * lam)
    return 0.5 * _pack(z, -1j * eu / lam**2, 1j * eu + z, z)


def delta_u_from_values(u, du, duy, lam):
    eu, emu = np.exp(u), np.exp(-u)
    off12 = (1j * eu / lam - 1j * emu) * du
    off21 = (1j * lam * eu - 1j * emu) * du
    return 0.5 * _pack(-1j * duy, off12, off21, 1j * duy)


def v_from_values(u, ux, lam):
    eu, emu = np.exp(u), np.exp(-u)
    return 0.5 * _pack(1j * ux, -eu / lam + emu, lam * eu - emu, -1j * ux)


def u_matrix(cd: CauchyData, x, lam) -> np.ndarray:
    lam = _check_lambda(lam)
    return u_from_values(cd.u(x), cd.u_y(x), lam)


def v_matrix(cd: CauchyData, x, lam) -> np.ndarray:
    """V_lambda; u_x is the spectral derivative of u."""
    lam = _check_lambda(lam)
    return v_from_values(cd.u(x), cd.u.derivative()(x), lam)


def delta_u_matrix(cd: CauchyData, x, lam, t: TangentVector) -> np.ndarray:
    """Variation of U_lambda in the direction t = (du, du_y)."""
    lam = _check_lambda(lam)
    return delta_u_from_values(cd.u(x), t.du(x), t.du_y(x), lam)


def dlambda_u_matrix(cd: CauchyData, x, lam) -> np.ndarray:
    lam = _check_lambda(lam)
    return dlambda_u_from_values(cd.u(x), lam)


def zero_curvature_residual(cd: CauchyData, x, lam, dy_u=None, dy_uy=None) -> np.ndarray:
    """d_y U - d_x V - [U, V] at x.

    d_y u is u_y by definition; d_y u_y is not part of Cauchy data and defaults
    to zero, which is exact for the vacuum.
    """
    lam = _check_lambda(lam)
    u, uy = cd.u(x), cd.u_y(x)
    ux = cd.u.derivative()(x)
    uxx = cd.u.derivative().derivative()(x)
    U = u_from_values(u, uy, lam)
    V = v_from_values(u, ux, lam)
    dyu = uy if dy_u is None else dy_u
    dyuy = np.zeros_like(u) if dy_uy is None else dy_uy
    eu, emu = np.exp(u), np.exp(-u)
    dyU = 0.5 * _pack(-1j * dyuy, (1j * eu / lam - 1j * emu) * dyu,
                      (1j * lam * eu - 1j * emu) * dyu, 1j * dyuy)
    dxV = 0.5 * _pack(1j * uxx, (-eu / lam - emu) * ux, (lam * eu + emu) * ux, -1j * uxx)
    return dyU - dxV - (U @ V - V @ U)
