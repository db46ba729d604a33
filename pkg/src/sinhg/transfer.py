"""Extended frame, monodromy and its derivatives.

The frame solves dF/dx = F U_lambda, F(0) = 1. Each step of size h is taken
with s-stage Gauss-Legendre collocation. Because the ODE is linear the step map
is a fixed 2x2 matrix P_n (computed for all steps at once, batched over
lambda), and the sequential part is just the product F_{n+1} = F_n P_n.
Gauss collocation conserves quadratic invariants, so det F stays 1 up to
rounding, and its step maps differentiate exactly: for a direction W
(d_lambda U or delta U) the augmented recursion G_{n+1} = G_n P_n + F_n dP_n
gives the exact derivative of the discrete monodromy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError, IntegrationError
from .fields import CauchyData, PathFunction, TangentVector, write_csv
from .lax import delta_u_from_values, dlambda_u_from_values, u_from_values
from .settings import DEFAULT_INTEGRATOR, DEFAULT_TOL, IntegratorSettings, Tolerances

E2 = np.array([0.0, 1.0], dtype=complex)


@lru_cache(maxsize=None)
def gauss_legendre_tableau(q: int):
    """Butcher tableau (c, A, b) of the q-stage Gauss-Legendre method on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(q)
    c = (x + 1) / 2
    b = w / 2
    # a_ij = int_0^{c_i} l_j, via exactness on monomials
    V = np.vander(c, q, increasing=True).T  # V[k, j] = c_j^k
    rhs = np.array([[ci ** (k + 1) / (k + 1) for k in range(q)] for ci in c])
    A = np.linalg.solve(V, rhs.T).T
    return c, A, b


def _check_lambdas(lam) -> np.ndarray:
    arr = np.asarray(lam, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("spectral parameter must be nonzero")
    return arr


@lru_cache(maxsize=32)
def _stage_fields(cd: CauchyData, substeps: int, stages: int):
    """u and u_y at every collocation point, shape (N * substeps, stages)."""
    x = stage_points(cd.period, cd.grid_size, substeps, stages)
    return np.asarray(cd.u(x)), np.asarray(cd.u_y(x))


def stage_points(period: float, n: int, substeps: int, stages: int) -> np.ndarray:
    c, _, _ = gauss_legendre_tableau(stages)
    h = period / (n * substeps)
    return (np.arange(n * substeps)[:, None] + c[None, :]) * h


def _step_maps(U, h, A, b, W=None):
    """Step propagators P (and dP along W) for row-vector ODE y' = y U.

    U, W: (..., q, 2, 2) generator at the stages of each step.
    """
    q = U.shape[-3]
    lead = U.shape[:-3]
    K = h * np.einsum("ml,...lij->...limj", A, U).reshape(lead + (2 * q, 2 * q))
    Minv = np.linalg.inv(np.eye(2 * q) - K)
    Bc = (h * b[:, None, None] * U).reshape(lead + (2 * q, 2))
    X = Minv @ Bc
    P = np.eye(2) + X.reshape(lead + (q, 2, 2)).sum(-3)
    if W is None:
        return P, None
    dK = h * np.einsum("ml,...lij->...limj", A, W).reshape(lead + (2 * q, 2 * q))
    dB = (h * b[:, None, None] * W).reshape(lead + (2 * q, 2))
    Y = Minv @ (dK @ X + dB)
    return P, Y.reshape(lead + (q, 2, 2)).sum(-3)


def _propagate(P, dP=None, record_every=None):
    """Ordered product of step maps. P: (L, S, 2, 2). Returns F_end, G_end, recorded frames."""
    L, S = P.shape[:2]
    F = np.broadcast_to(np.eye(2, dtype=complex), (L, 2, 2)).copy()
    G = np.zeros((L, 2, 2), dtype=complex) if dP is not None else None
    rec = None
    if record_every:
        rec = np.empty((L, S // record_every + 1, 2, 2), dtype=complex)
        rec[:, 0] = F
    for n in range(S):
        if dP is not None:
            G = G @ P[:, n] + F @ dP[:, n]
        F = F @ P[:, n]
        if record_every and (n + 1) % record_every == 0:
            rec[:, (n + 1) // record_every] = F
    return F, G, rec


def _run(cd, lams, settings, direction=None, record=False):
    """Integrate for a flat array of lambdas in chunks.

    direction: None, "lambda", or a TangentVector.
    """
    c, A, b = gauss_legendre_tableau(settings.stages)
    s = settings.substeps
    h = cd.period / (cd.grid_size * s)
    u, uy = _stage_fields(cd, s, settings.stages)
    if isinstance(direction, TangentVector):
        x = stage_points(cd.period, cd.grid_size, s, settings.stages)
        du, duy = np.asarray(direction.du(x)), np.asarray(direction.du_y(x))
    Fs, Gs, recs = [], [], []
    for start in range(0, lams.size, settings.chunk):
        lam = lams[start:start + settings.chunk][:, None, None]
        U = u_from_values(u, uy, lam)
        if direction is None:
            W = None
        elif isinstance(direction, str):
            W = dlambda_u_from_values(u, lam)
        else:
            W = delta_u_from_values(u, du, duy, lam)
        P, dP = _step_maps(U, h, A, b, W)
        F, G, rec = _propagate(P, dP, s if record else None)
        Fs.append(F)
        Gs.append(G)
        recs.append(rec)
    F = np.concatenate(Fs)
    G = np.concatenate(Gs) if direction is not None else None
    rec = np.concatenate(recs) if record else None
    return F, G, rec


def det_residual(M) -> np.ndarray:
    """|det M - 1| scaled by max(1, |M|^2); rounding in det grows with the entries."""
    M = np.asarray(M)
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    scale = np.maximum(1.0, np.abs(M).max(axis=(-2, -1)) ** 2)
    return np.abs(det - 1) / scale


def _renormalize(M, lams, tol: Tolerances):
    res = det_residual(M)
    bad = res > tol.det
    if np.any(bad):
        i = int(np.argmax(res))
        raise IntegrationError(
            f"determinant drift {res[i]:.3e} exceeds tol_det at lambda={lams.flat[i]}",
            lam=complex(lams.flat[i]), residual=float(res[i]))
    fix = res > tol.det / 10
    if np.any(fix):
        det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
        M = M.copy()
        M[fix] /= np.sqrt(det[fix])[:, None, None]
    return M


def monodromy(cd: CauchyData, lam, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
              tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """M_lambda = F_lambda(p). Scalar lam gives (2, 2); array lam gives lam.shape + (2, 2)."""
    lams = _check_lambdas(lam)
    F, _, _ = _run(cd, lams.ravel(), settings)
    F = _renormalize(F, lams.ravel(), tol)
    return F.reshape(lams.shape + (2, 2))


def monodromy_with_lambda_derivative(cd: CauchyData, lam,
                                     settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                                     tol: Tolerances = DEFAULT_TOL):
    lams = _check_lambdas(lam)
    F, G, _ = _run(cd, lams.ravel(), settings, direction="lambda")
    _renormalize(F, lams.ravel(), tol)
    return F.reshape(lams.shape + (2, 2)), G.reshape(lams.shape + (2, 2))


def monodromy_lambda_derivative(cd: CauchyData, lam,
                                settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                                tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """d_lambda M from the augmented recursion (exact derivative of the discrete map)."""
    return monodromy_with_lambda_derivative(cd, lam, settings, tol)[1]


def monodromy_variation(cd: CauchyData, lam, t: TangentVector,
                        settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                        tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """delta M_lambda in direction t, integrated alongside the frame."""
    lams = _check_lambdas(lam)
    F, G, _ = _run(cd, lams.ravel(), settings, direction=t)
    _renormalize(F, lams.ravel(), tol)
    return G.reshape(lams.shape + (2, 2))


def monodromy_error_estimate(cd: CauchyData, lam,
                             settings: IntegratorSettings = DEFAULT_INTEGRATOR) -> np.ndarray:
    """Step-halving estimate |M(h) - M(h/2)| (max-norm), relative to max(1, |M|)."""
    lams = _check_lambdas(lam)
    M1, _, _ = _run(cd, lams.ravel(), settings)
    M2, _, _ = _run(cd, lams.ravel(), settings.refined())
    err = np.abs(M1 - M2).max(axis=(-2, -1)) / np.maximum(1.0, np.abs(M2).max(axis=(-2, -1)))
    return err.reshape(lams.shape)


def inverse2(M) -> np.ndarray:
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    adj = np.empty_like(M)
    adj[..., 0, 0] = M[..., 1, 1]
    adj[..., 1, 1] = M[..., 0, 0]
    adj[..., 0, 1] = -M[..., 0, 1]
    adj[..., 1, 0] = -M[..., 1, 0]
    return adj / det[..., None, None]


@dataclass(frozen=True, eq=False)
class FramePath:
    lam: complex
    period: float
    frames: np.ndarray = field(repr=False)  # (N + 1, 2, 2) at x_k = k p / N
    inverse_frames: np.ndarray = field(repr=False)

    @property
    def nodes(self) -> np.ndarray:
        n = self.frames.shape[0] - 1
        return np.arange(n + 1) * (self.period / n)

    @property
    def monodromy(self) -> np.ndarray:
        return self.frames[-1]

    def det_residual(self) -> float:
        return float(det_residual(self.frames).max())

    def entry(self, i: int, j: int) -> PathFunction:
        return PathFunction(self.period, self.frames[:, i, j])

    def to_csv(self, path) -> None:
        cols = [self.frames[:, i, j] for i in range(2) for j in range(2)]
        write_csv(path, self.nodes, *cols, names=["F11", "F12", "F21", "F22"])


def integrate_frame(cd: CauchyData, lam, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                    tol: Tolerances = DEFAULT_TOL) -> FramePath:
    lam = complex(_check_lambdas(lam))
    F, _, rec = _run(cd, np.array([lam]), settings, record=True)
    _renormalize(F, np.array([lam]), tol)
    frames = rec[0]
    worst = det_residual(frames).max()
    if worst > tol.det:
        raise IntegrationError(f"determinant drift {worst:.3e} along the path", lam=lam,
                               residual=float(worst))
    return FramePath(lam, cd.period, frames, inverse2(frames))


def integrate_phi_direct(cd: CauchyData, lam, settings: IntegratorSettings = DEFAULT_INTEGRATOR):
    """phi from dphi/dx = -U phi, phi(0) = (0, 1), without forming the frame inverse.

    Written as the row ODE phi^t' = phi^t (-U^t); returns (N + 1, 2).
    """
    lam = complex(_check_lambdas(lam))
    c, A, b = gauss_legendre_tableau(settings.stages)
    s = settings.substeps
    h = cd.period / (cd.grid_size * s)
    u, uy = _stage_fields(cd, s, settings.stages)
    U = -np.swapaxes(u_from_values(u, uy, lam), -1, -2)
    P, _ = _step_maps(U[None], h, A, b)
    _, _, rec = _propagate(P, record_every=s)
    # rows of the recorded product are e1^t Phi, e2^t Phi; phi^t = e2^t Phi
    return rec[0][:, 1, :]


@dataclass(frozen=True, eq=False)
class EigenSolutions:
    """phi = F^{-1} e2, psi = F^t e2 and derived quantities on the path grid."""

    lam: complex
    phi1: PathFunction
    phi2: PathFunction
    psi1: PathFunction
    psi2: PathFunction
    u: PathFunction
    u_y: PathFunction

    @property
    def omega(self) -> PathFunction:
        return self.psi1 * self.phi1 - self.psi2 * self.phi2

    @property
    def phi1phi2(self) -> PathFunction:
        return self.phi1 * self.phi2

    def _exp(self):
        return self.u.apply(np.exp), self.u.apply(lambda v: np.exp(-v))

    @property
    def dy_phi1phi2(self) -> PathFunction:
        """y-derivative of phi1 phi2 as given by the y-part of the phi system."""
        eu, emu = self._exp()
        lam = self.lam
        return 0.5 * ((-lam * eu + emu) * self.phi1 * self.phi1
                      + (eu / lam - emu) * self.phi2 * self.phi2)

    @property
    def dy_omega(self) -> PathFunction:
        eu, emu = self._exp()
        lam = self.lam
        return ((lam * eu - emu) * self.phi1 * self.psi2
                + (eu / lam - emu) * self.psi1 * self.phi2)

    def pairing(self) -> PathFunction:
        """psi1 phi1 + psi2 phi2, identically one."""
        return self.psi1 * self.phi1 + self.psi2 * self.phi2

    def to_csv(self, path) -> None:
        cols = [f.samples for f in (self.phi1, self.phi2, self.psi1, self.psi2, self.omega)]
        write_csv(path, self.phi1.nodes, *cols, names=["phi1", "phi2", "psi1", "psi2", "omega"])


def eigen_solutions(cd: CauchyData, lam, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                    tol: Tolerances = DEFAULT_TOL, cross_check: bool = True) -> EigenSolutions:
    path = integrate_frame(cd, lam, settings, tol)
    phi = path.inverse_frames @ E2
    psi = np.swapaxes(path.frames, -1, -2) @ E2
    if cross_check:
        direct = integrate_phi_direct(cd, path.lam, settings)
        scale = max(1.0, np.abs(phi).max())
        err = np.abs(direct - phi).max() / scale
        if err > tol.ode:
            raise ConsistencyError(
                f"phi from F^-1 e2 and from direct integration differ by {err:.3e} at lambda={path.lam}")
    p = cd.period
    return EigenSolutions(
        path.lam,
        PathFunction(p, phi[:, 0]), PathFunction(p, phi[:, 1]),
        PathFunction(p, psi[:, 0]), PathFunction(p, psi[:, 1]),
        PathFunction(p, cd.u.path_values()), PathFunction(p, cd.u_y.path_values()),
    )


def variation_by_quadrature(cd: CauchyData, lam, t: TangentVector,
                            settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                            tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """(int_0^p F dU F^{-1} dx) M on the path grid; independent of the augmented recursion."""
    path = integrate_frame(cd, lam, settings, tol)
    u = cd.u.path_values()
    dU = delta_u_from_values(u, t.du.path_values(), t.du_y.path_values(), path.lam)
    integrand = path.frames @ dU @ path.inverse_frames
    out = np.empty((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[i, j] = PathFunction(cd.period, integrand[:, i, j]).integral()
    return out @ path.monodromy


J = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


def frame_identity_residuals(cd: CauchyData, lam, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                             tol: Tolerances = DEFAULT_TOL) -> dict:
    """Max residuals over the grid of det F = 1, psi^t phi = 1 and (1, 0) F = -phi^t J."""
    path = integrate_frame(cd, lam, settings, tol)
    phi = path.inverse_frames @ E2
    psi = np.swapaxes(path.frames, -1, -2) @ E2
    row = path.frames[:, 0, :]
    return {
        "det": path.det_residual(),
        "pairing": float(np.abs(np.sum(psi * phi, axis=-1) - 1).max()),
        "row_covector": float(np.abs(row + phi @ J).max()),
    }
