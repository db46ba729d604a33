"""Spectral curve functions, eigenlines and the divisor of zeros of b.

The divisor search works in z = log(lambda). The annulus window becomes a
rectangle that is periodic in arg(lambda); it is cut into sectors and each cell
gets an argument-principle count of the zeros of b, obtained by tracking
arg(b) along the cell boundary with adaptive bisection. Cells holding more than
one zero are split, cells holding exactly one are finished with Newton's
method using the exact lambda-derivative of the discrete monodromy.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (AssumptionViolation, ClassificationAmbiguous, ConfigError,
                     EigenvectorNormalizationError, IncompleteSearchError)
from .fields import CauchyData
from .settings import DEFAULT_INTEGRATOR, DEFAULT_TOL, IntegratorSettings, Tolerances
from .transfer import (det_residual, eigen_solutions, monodromy,
                       monodromy_with_lambda_derivative)

GENERIC = "generic"
JORDAN = "jordan"
FULL_KERNEL = "full_kernel"


@dataclass(frozen=True)
class CharFunctions:
    lam: complex
    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def delta(self) -> complex:
        return self.a + self.d

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def unimodularity_residual(self) -> float:
        return float(det_residual(self.matrix))

    @classmethod
    def from_matrix(cls, lam, M) -> "CharFunctions":
        return cls(complex(lam), complex(M[0, 0]), complex(M[0, 1]), complex(M[1, 0]), complex(M[1, 1]))


def char_functions(cd: CauchyData, lam, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                   tol: Tolerances = DEFAULT_TOL) -> CharFunctions:
    return CharFunctions.from_matrix(lam, monodromy(cd, lam, settings, tol))


def spectral_mu(cf: CharFunctions) -> tuple[complex, complex]:
    """Both roots of mu^2 - Delta mu + 1 = 0; the second is computed as 1 / first."""
    delta = cf.delta
    s = cmath.sqrt(delta * delta - 4)
    if abs(delta + s) < abs(delta - s):
        s = -s
    mu = (delta + s) / 2
    return mu, 1 / mu


def eigenvectors(cf: CharFunctions, mu: complex, tol: float = 1e-12):
    """Eigenvectors v of M and w of M^t for eigenvalue mu, first components normalized to 1.

    Uses whichever of the two equivalent quotients has the larger denominator.
    """
    a, b, c, d = cf.a, cf.b, cf.c, cf.d
    scale = max(1.0, abs(a), abs(b), abs(c), abs(d))
    if abs(b) <= tol * scale and abs(mu - d) <= tol * scale:
        raise EigenvectorNormalizationError(
            f"lambda={cf.lam} is a divisor point: b = 0 and mu = d, v is not normalizable")
    v2 = (mu - a) / b if abs(b) >= abs(mu - d) else c / (mu - d)
    if abs(c) <= tol * scale and abs(mu - a) <= tol * scale and abs(b) > tol * scale \
            and abs(mu - d) <= tol * scale:
        raise EigenvectorNormalizationError(f"w is not normalizable at lambda={cf.lam}")
    w2 = (mu - a) / c if abs(c) >= abs(mu - d) else b / (mu - d)
    return np.array([1.0, v2], dtype=complex), np.array([1.0, w2], dtype=complex)


def eigenvector_forms_residual(cf: CharFunctions, mu: complex) -> float:
    """|(mu - a)/b - c/(mu - d)|, zero on the curve away from the divisor."""
    return abs((mu - cf.a) / cf.b - cf.c / (mu - cf.d))


# ---------------------------------------------------------------------------
# divisor


@dataclass(frozen=True)
class Annulus:
    r_min: float
    r_max: float
    depth: int = 14
    sectors: int = 8

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max < math.inf):
            raise ConfigError(f"invalid annulus {self.r_min} <= |lambda| <= {self.r_max}")
        if self.depth < 1 or self.sectors < 1:
            raise ConfigError("annulus depth and sectors must be positive")

    def contains(self, lam: complex) -> bool:
        return self.r_min <= abs(lam) <= self.r_max


@dataclass(frozen=True, eq=False)
class DivisorPoint:
    lambda_i: complex
    mu_i: complex
    classification: str
    kappa: complex
    dlambda_b: complex
    dlambda_d: complex
    c_value: complex
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        pair = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {"lambda": pair(self.lambda_i), "mu": pair(self.mu_i), "class": self.classification,
                "kappa": pair(self.kappa), "dlambda_b": pair(self.dlambda_b),
                "residuals": {k: float(v) for k, v in self.residuals.items()}}


class _RootOnContour(Exception):
    pass


# golden-ratio based split positions keep cell edges off symmetric root locations
_SPLITS = (0.5 + 0.0381966, 0.5 - 0.0527864, 0.5 + 0.1180340, 0.5 - 0.1458980)
_THETA_OFFSET = 0.1234567


class _BSampler:
    def __init__(self, cd, settings, tol):
        self.cd, self.settings, self.tol = cd, settings, tol
        self.calls = 0

    def __call__(self, z: np.ndarray) -> np.ndarray:
        self.calls += z.size
        M = monodromy(self.cd, np.exp(z), self.settings, self.tol)
        return M[..., 0, 1]


def _track_winding(bfun, zmap, n0: int, max_rounds: int = 12, closed: bool = True) -> float:
    """Total change of arg b / 2 pi along z = zmap(t), t in [0, 1].

    Bisects every interval on which b changes by more than half its size.
    """
    t = np.linspace(0.0, 1.0, n0 + 1)
    b = bfun(zmap(t))
    for _ in range(max_rounds):
        ratio = b[1:] / b[:-1]
        bad = np.abs(ratio - 1) > 0.5
        if not np.any(bad):
            break
        tm = 0.5 * (t[:-1][bad] + t[1:][bad])
        bm = bfun(zmap(tm))
        t = np.concatenate([t, tm])
        b = np.concatenate([b, bm])
        order = np.argsort(t)
        t, b = t[order], b[order]
    scale = np.median(np.abs(b))
    if np.any(np.abs(b) < 1e-9 * scale) or not np.all(np.isfinite(b)):
        raise _RootOnContour
    return float(np.sum(np.angle(b[1:] / b[:-1])) / (2 * np.pi))


@dataclass
class _Cell:
    s0: float
    s1: float
    t0: float
    t1: float
    level: int = 0
    winding: int | None = None

    def contour(self):
        s0, s1, t0, t1 = self.s0, self.s1, self.t0, self.t1

        def edge(za, zb):
            return lambda t: za + (zb - za) * t

        corners = [complex(s0, t0), complex(s1, t0), complex(s1, t1), complex(s0, t1)]
        return [edge(corners[k], corners[(k + 1) % 4]) for k in range(4)]

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.s0 + self.s1), 0.5 * (self.t0 + self.t1))

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        ds, dt = margin * (self.s1 - self.s0), margin * (self.t1 - self.t0)
        return (self.s0 - ds <= z.real <= self.s1 + ds) and (self.t0 - dt <= z.imag <= self.t1 + dt)

    def split(self, frac: float):
        if (self.s1 - self.s0) >= (self.t1 - self.t0):
            m = self.s0 + frac * (self.s1 - self.s0)
            return (_Cell(self.s0, m, self.t0, self.t1, self.level + 1),
                    _Cell(m, self.s1, self.t0, self.t1, self.level + 1))
        m = self.t0 + frac * (self.t1 - self.t0)
        return (_Cell(self.s0, self.s1, self.t0, m, self.level + 1),
                _Cell(self.s0, self.s1, m, self.t1, self.level + 1))


def _edge_samples(za: complex, zb: complex) -> int:
    return int(min(128, max(8, 8 * abs(zb - za))))


def _cell_winding(bfun, cell: _Cell) -> int:
    total = 0.0
    s0, s1, t0, t1 = cell.s0, cell.s1, cell.t0, cell.t1
    corners = [complex(s0, t0), complex(s1, t0), complex(s1, t1), complex(s0, t1)]
    for k, fn in enumerate(cell.contour()):
        total += _track_winding(bfun, fn, _edge_samples(corners[k], corners[(k + 1) % 4]))
    w = round(total)
    if abs(total - w) > 1e-6:
        raise _RootOnContour
    return int(w)


def newton_root(cd: CauchyData, lam0: complex, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                tol: Tolerances = DEFAULT_TOL, max_iter: int = 60):
    """Newton iteration for b(lambda) = 0 in z = log(lambda).

    Returns (lambda, converged, M, dM) with M, dM evaluated at the returned lambda.
    """
    z = cmath.log(lam0)
    for _ in range(max_iter):
        lam = cmath.exp(z)
        M, dM = monodromy_with_lambda_derivative(cd, lam, settings, tol)
        step = M[0, 1] / (lam * dM[0, 1])
        if not np.isfinite(step):
            return lam, False, M, dM
        z = z - step
        if abs(step) < tol.root:
            lam = cmath.exp(z)
            M, dM = monodromy_with_lambda_derivative(cd, lam, settings, tol)
            return lam, True, M, dM
        if abs(step) > 10:
            break
    lam = cmath.exp(z)
    M, dM = monodromy_with_lambda_derivative(cd, lam, settings, tol)
    return lam, False, M, dM


def _classify(M: np.ndarray, mu: complex, tol: Tolerances) -> tuple[str, dict]:
    scale = max(1.0, float(np.abs(M).max()))
    eps = tol.classify * scale
    sign = 1.0 if abs(mu - 1) <= abs(mu + 1) else -1.0
    dist = abs(mu - sign)
    c = complex(M[1, 0])
    off_identity = float(np.abs(M - sign * np.eye(2)).max())
    diag = {"mu_distance_to_pm1": dist, "abs_c": abs(c), "distance_to_pm_identity": off_identity}
    if dist > 100 * eps:
        return GENERIC, diag
    if dist <= eps:
        if abs(c) > 100 * eps:
            return JORDAN, diag
        if off_identity <= eps:
            return FULL_KERNEL, diag
    raise ClassificationAmbiguous(
        f"cannot classify divisor point with mu={mu}: diagnostics {diag}", diagnostics=diag)


UNCLASSIFIED = "unclassified"


def _make_point(cd, lam, M, dM, settings, tol, with_kappa=True, classify=True) -> DivisorPoint:
    mu = complex(M[1, 1])
    cls, diag = _classify(M, mu, tol) if classify else (UNCLASSIFIED, {})
    scale = max(1.0, float(np.abs(M).max()))
    residuals = {
        "b": abs(M[0, 1]) / scale,
        "d_minus_mu": 0.0,
        "a_minus_inv_mu": abs(M[0, 0] - 1 / mu) / scale,
        "det": float(det_residual(M)),
        "dlambda_delta": abs(dM[0, 0] + dM[1, 1]),
        **diag,
    }
    kappa = complex("nan")
    if with_kappa:
        es = eigen_solutions(cd, lam, settings, tol, cross_check=False)
        kappa = compute_kappa(es)
    return DivisorPoint(complex(lam), mu, cls, kappa, complex(dM[0, 1]), complex(dM[1, 1]),
                        complex(M[1, 0]), residuals)


def compute_kappa(es) -> complex:
    """kappa = int_0^p (lam phi1^2 + phi2^2 / lam) e^u dx."""
    eu = es.u.apply(np.exp)
    lam = es.lam
    return ((lam * es.phi1 * es.phi1 + es.phi2 * es.phi2 / lam) * eu).integral()


def classify_divisor_point(cd: CauchyData, pt: DivisorPoint,
                           settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                           tol: Tolerances = DEFAULT_TOL) -> str:
    M = monodromy(cd, pt.lambda_i, settings, tol)
    return _classify(M, complex(M[1, 1]), tol)[0]


def classify_matrix(M, tol: Tolerances = DEFAULT_TOL) -> str:
    """Classification of a divisor-point monodromy given directly (b assumed zero)."""
    M = np.asarray(M, dtype=complex)
    return _classify(M, complex(M[1, 1]), tol)[0]


@dataclass
class SearchStats:
    winding: int = 0
    cells: int = 0
    evaluations: int = 0


def find_divisor(cd: CauchyData, window: Annulus, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                 tol: Tolerances = DEFAULT_TOL, with_kappa: bool = True,
                 stats: SearchStats | None = None) -> list[DivisorPoint]:
    """All zeros of b with r_min <= |lambda| <= r_max, sorted by |lambda| then arg."""
    bfun = _BSampler(cd, settings, tol)
    s0, s1 = math.log(window.r_min), math.log(window.r_max)
    th0 = -math.pi + _THETA_OFFSET

    def circle(s):
        return lambda t: s + 1j * (th0 + 2 * math.pi * t)

    try:
        n_circ = 8 * window.sectors
        total = (_track_winding(bfun, circle(s1), n_circ)
                 - _track_winding(bfun, circle(s0), n_circ))
    except _RootOnContour:
        raise IncompleteSearchError("a zero of b lies on the window boundary") from None
    total_w = round(total)

    width = 2 * math.pi / window.sectors
    pending = [_Cell(s0, s1, th0 + k * width, th0 + (k + 1) * width) for k in range(window.sectors)]
    roots: list[tuple[complex, np.ndarray, np.ndarray]] = []
    n_cells = 0
    cell_sum = 0
    while pending:
        cell = pending.pop()
        n_cells += 1
        if cell.winding is None:
            try:
                cell.winding = _cell_winding(bfun, cell)
            except _RootOnContour:
                raise IncompleteSearchError("a zero of b lies on a sector edge") from None
        w = cell.winding
        if cell.level == 0:
            cell_sum += w
        if w == 0:
            continue
        if w == 1:
            lam, ok, M, dM = newton_root(cd, cmath.exp(cell.center), settings, tol)
            z = cmath.log(lam)
            zz = complex(z.real, _wrap_theta(z.imag, cell.t0))
            if ok and cell.contains(zz, margin=1e-9):
                roots.append((lam, M, dM))
                continue
        if cell.level >= window.depth:
            if w >= 2:
                raise AssumptionViolation(
                    f"{w} zeros of b in a cell of size {cell.s1 - cell.s0:.2e} near "
                    f"lambda={cmath.exp(cell.center)}: not a simple divisor", lam=cmath.exp(cell.center))
            raise IncompleteSearchError("Newton failed to converge in an isolating cell", winding=w)
        for frac in _SPLITS:
            try:
                children = cell.split(frac)
                for ch in children:
                    ch.winding = _cell_winding(bfun, ch)
            except _RootOnContour:
                continue
            if sum(ch.winding for ch in children) != w:
                raise IncompleteSearchError(
                    f"cell windings {[ch.winding for ch in children]} do not add up to {w}", winding=w)
            break
        else:
            raise IncompleteSearchError("could not place a cell edge away from the zeros of b")
        pending.extend(children)

    roots = _merge(roots, tol)
    if stats is not None:
        stats.winding, stats.cells, stats.evaluations = total_w, n_cells, bfun.calls
    if len(roots) != total_w or cell_sum != total_w:
        raise IncompleteSearchError(
            f"winding count {total_w} (cells {cell_sum}) but {len(roots)} roots converged",
            winding=total_w, found=len(roots))

    points = [_make_point(cd, lam, M, dM, settings, tol, with_kappa) for lam, M, dM in roots]
    _check_simple(points, tol)
    points.sort(key=lambda p: (round(abs(p.lambda_i), 12), cmath.phase(p.lambda_i)))
    return points


def _wrap_theta(theta: float, t0: float) -> float:
    while theta < t0 - 1e-12:
        theta += 2 * math.pi
    while theta >= t0 + 2 * math.pi:
        theta -= 2 * math.pi
    return theta


def _merge(roots, tol: Tolerances):
    out = []
    for r in roots:
        if all(abs(r[0] - q[0]) >= tol.merge * abs(r[0]) for q in out):
            out.append(r)
    return out


def _check_simple(points: list[DivisorPoint], tol: Tolerances) -> None:
    if not points:
        return
    thresh = tol.simple_rel * float(np.median([abs(p.dlambda_b) for p in points]))
    for p in points:
        if abs(p.dlambda_b) <= thresh:
            raise AssumptionViolation(
                f"divisor point lambda={p.lambda_i} is not simple: |d_lambda b| = {abs(p.dlambda_b):.3e}",
                lam=p.lambda_i)


def refine_divisor_point(cd: CauchyData, lam0: complex, settings: IntegratorSettings = DEFAULT_INTEGRATOR,
                         tol: Tolerances = DEFAULT_TOL, with_kappa: bool = False) -> DivisorPoint:
    """Newton from a nearby lambda; used to follow a divisor point under perturbation.

    The point is not classified: after a small perturbation a point with
    mu = +-1 sits at a distance from +-1 comparable to the perturbation, which
    the classification thresholds cannot resolve.
    """
    lam, ok, M, dM = newton_root(cd, lam0, settings, tol)
    if not ok:
        raise IncompleteSearchError(f"Newton did not converge from lambda={lam0}")
    return _make_point(cd, lam, M, dM, settings, tol, with_kappa, classify=False)


def divisor_to_json(points: list[DivisorPoint]) -> str:
    return json.dumps([p.to_dict() for p in points], indent=1)


def divisor_csv_rows(points: list[DivisorPoint]):
    header = ["lambda_re", "lambda_im", "mu_re", "mu_im", "class", "kappa_re", "kappa_im",
              "dlambda_b_re", "dlambda_b_im", "res_b", "res_a_minus_inv_mu", "res_det"]
    rows = []
    for p in points:
        rows.append([p.lambda_i.real, p.lambda_i.imag, p.mu_i.real, p.mu_i.imag, p.classification,
                     p.kappa.real, p.kappa.imag, p.dlambda_b.real, p.dlambda_b.imag,
                     p.residuals["b"], p.residuals["a_minus_inv_mu"], p.residuals["det"]])
    return header, rows
