"""Command line entry point: ``sinhg {spectrum,divisor,verify,darboux,oracle}``.

Every run is described by a RunConfig, read from an optional JSON file and
then overridden by flags. Output files go to ``--out``; the same config and
seed always give byte-identical reports.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import corpus
from .darboux import (VerificationReport, calibrate_constants, divisor_frame, divisor_identity_report,
                      dlambda_b_vs_kappa, random_pairs, sample_tables, verify_antiderivatives,
                      verify_basic_identities, verify_darboux, verify_delta_b, verify_delta_d,
                      verify_symplectic_basis, CheckResult, provenance)
from .errors import ConfigError, DomainError, SinhGError
from .oracle import oracle_table, vacuum_divisor
from .settings import IntegratorSettings, Tolerances
from .spectral import Annulus, FULL_KERNEL, divisor_csv_rows, divisor_to_json, find_divisor
from .transfer import det_residual, frame_identity_residuals, monodromy

FMT = "%.17g"

CALIBRATION_FAMILY = [{"name": "cos_perturbation", "params": {"eps_u": e}} for e in (0.1, 0.2, 0.3)]


@dataclass(frozen=True)
class RunConfig:
    period: float = 1.0
    data: dict = field(default_factory=lambda: {"name": "vacuum", "params": {}})
    samples: str | None = None
    grid: int = 256
    r_min: float = 0.01
    r_max: float = 100.0
    tolerances: dict = field(default_factory=dict)
    max_points: int = 4
    out: str = "sinhg_out"
    seed: int = 0
    lambdas: list = field(default_factory=list)
    probe_lambdas: list = field(default_factory=lambda: [0.7, 1.3, [0.6, 0.8], [-0.8, 0.6], 2.0])
    calibration: list = field(default_factory=lambda: [dict(d) for d in CALIBRATION_FAMILY])

    def __post_init__(self):
        if not self.period > 0:
            raise ConfigError("period must be positive")
        if not (0 < self.r_min < self.r_max):
            raise ConfigError(f"window needs 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if self.max_points < 1:
            raise ConfigError("divisor point cap K must be >= 1")
        if self.grid < 8 or self.grid % 2:
            raise ConfigError("grid size must be even and >= 8")
        self.tol()

    def tol(self) -> Tolerances:
        try:
            return Tolerances().with_overrides(**self.tolerances)
        except TypeError as exc:
            raise ConfigError(f"unknown tolerance: {exc}") from None

    def window(self) -> Annulus:
        return Annulus(self.r_min, self.r_max)

    def cauchy_data(self):
        if self.samples:
            return corpus.load_samples(self.samples, self.period)
        return corpus.builtin_data(self.data.get("name", ""), self.data.get("params", {}),
                                   self.period, self.grid)

    def lambda_grid(self) -> np.ndarray:
        return np.array([_to_complex(z) for z in self.lambdas], dtype=complex)


def _to_complex(z) -> complex:
    if isinstance(z, (list, tuple)):
        return complex(float(z[0]), float(z[1]))
    return complex(z)


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            blob = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(blob, dict):
        raise ConfigError("config must be a JSON object")
    return blob


def build_config(args: argparse.Namespace) -> RunConfig:
    raw = load_config(args.config)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    over = {}
    if args.period is not None:
        over["period"] = args.period
    if args.grid is not None:
        over["grid"] = args.grid
    if args.window is not None:
        over["r_min"], over["r_max"] = args.window
    if args.seed is not None:
        over["seed"] = args.seed
    if args.out is not None:
        over["out"] = args.out
    if args.data is not None:
        over["data"] = {"name": args.data, "params": json.loads(args.params or "{}")}
    if args.samples is not None:
        over["samples"] = args.samples
    if args.max_points is not None:
        over["max_points"] = args.max_points
    tols = dict(cfg.tolerances)
    for name in Tolerances.__dataclass_fields__:
        val = getattr(args, f"tol_{name}", None)
        if val is not None:
            tols[name] = val
    over["tolerances"] = tols
    return replace(cfg, **over)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("SINHG_THREADS", "1")))
    except ValueError:
        raise ConfigError("SINHG_THREADS must be an integer") from None


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FMT % v
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_json(path: Path, blob) -> None:
    path.write_text(json.dumps(blob, indent=1, sort_keys=False) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def spectrum_rows(cd, lams: np.ndarray, tol: Tolerances, settings=IntegratorSettings()):
    """One row per lambda; failures are recorded in the status column."""

    def row(lam: complex):
        try:
            if lam == 0:
                raise DomainError("lambda = 0")
            M = monodromy(cd, lam, settings, tol)
            return [lam.real, lam.imag, (M[0, 0] + M[1, 1]).real, (M[0, 0] + M[1, 1]).imag,
                    M[0, 1].real, M[0, 1].imag, float(det_residual(M)), "ok"]
        except DomainError:
            return [lam.real, lam.imag] + [float("nan")] * 5 + ["domain_error"]
        except SinhGError as exc:
            return [lam.real, lam.imag] + [float("nan")] * 5 + [type(exc).__name__]

    with ThreadPoolExecutor(threads()) as pool:
        return list(pool.map(row, [complex(z) for z in lams]))


SPECTRUM_HEADER = ["lambda_re", "lambda_im", "delta_re", "delta_im", "b_re", "b_im", "det_residual", "status"]


def cmd_spectrum(cfg: RunConfig) -> int:
    cd = cfg.cauchy_data()
    rows = spectrum_rows(cd, cfg.lambda_grid(), cfg.tol())
    _write_csv(_outdir(cfg) / "spectrum.csv", SPECTRUM_HEADER, rows)
    return 0


def cmd_divisor(cfg: RunConfig) -> int:
    cd = cfg.cauchy_data()
    points = find_divisor(cd, cfg.window(), tol=cfg.tol())
    out = _outdir(cfg)
    (out / "divisor.json").write_text(divisor_to_json(points) + "\n")
    header, rows = divisor_csv_rows(points)
    _write_csv(out / "divisor.csv", header, rows)
    return 0


def _frames(cd, cfg: RunConfig, tol: Tolerances):
    points = find_divisor(cd, cfg.window(), tol=tol)[: cfg.max_points]
    with ThreadPoolExecutor(threads()) as pool:
        return list(pool.map(lambda p: divisor_frame(cd, p, tol=tol), points))


def _calibration_tables(cfg: RunConfig, tol: Tolerances):
    tables = []
    for spec in cfg.calibration:
        cd = corpus.builtin_data(spec["name"], spec.get("params", {}), cfg.period, cfg.grid)
        frames = _frames(cd, cfg, tol)
        tangents = [corpus.random_tangent(cd, cfg.seed + s) for s in range(3)]
        tables.append(sample_tables(cd, frames, tangents, tol=tol))
    return tables


def _is_minus_one_point(frame) -> bool:
    return frame.point.classification == FULL_KERNEL and abs(frame.lam + 1) < 0.05 \
        and abs(frame.mu - 1) < 1e-6


def darboux_block(cfg: RunConfig, cd, frames, tol: Tolerances) -> tuple[VerificationReport, dict]:
    rep = VerificationReport(provenance=provenance(cd, tol))
    cal = calibrate_constants(_calibration_tables(cfg, tol), seed=cfg.seed + 7)
    rep.add(CheckResult("calibration_stability", "empirical constants in delta d and the Darboux sum",
                        max(cal.c_d_spread, cal.c_omega_spread), cal.c_omega,
                        max(cal.c_d_spread, cal.c_omega_spread), cal.stable_tol, cal.stable,
                        {"c_d": complex(cal.c_d)}))
    tangents = [corpus.random_tangent(cd, cfg.seed + 100 + s) for s in range(3)]
    if frames:
        rep.extend(verify_delta_b(cd, frames, tangents, tol=tol))
        tab = sample_tables(cd, frames, tangents, tol=tol)
        rep.add(verify_delta_d(tab, cal.c_d))
        if len(frames) >= 2:
            rep.add(verify_darboux(tab, random_pairs(len(frames), 20, cfg.seed + 11), cal.c_omega))
    warnings = []
    if abs(cal.c_d - (-1j)) > 1e-6:
        warnings.append(f"fitted c_d = {cal.c_d:.10g} differs from the printed -i")
    if abs(cal.c_omega - 0.5j) > 1e-6:
        warnings.append(f"fitted c_Omega = {cal.c_omega:.10g} differs from the printed i/2")
    return rep, {"calibration": cal.to_dict(), "warnings": warnings}


def verify_all(cfg: RunConfig) -> tuple[VerificationReport, dict]:
    cd = cfg.cauchy_data()
    tol = cfg.tol()
    rep = VerificationReport(provenance=provenance(cd, tol))
    probes = [_to_complex(z) for z in cfg.probe_lambdas]
    for lam in probes:
        res = frame_identity_residuals(cd, lam, tol=tol)
        for key, val in res.items():
            limit = tol.det if key == "det" else 1e-9
            rep.add(CheckResult(f"frame_{key}@{lam:.6g}", "det F = 1, psi^t phi = 1, (1,0)F = -phi^t J",
                                val, None, val, limit, val < limit))
        rep.extend(verify_basic_identities(cd, lam, tol=tol))
    for li, lj in zip(probes, probes[1:] + probes[:1]):
        rep.extend(verify_antiderivatives(cd, li, lj, tol=tol))
    frames = _frames(cd, cfg, tol)
    rep.extend(divisor_identity_report(frames, tol, cd))
    for f in frames:
        rep.add(dlambda_b_vs_kappa(f, cd))
    variants = {"included": frames, "excluded": [f for f in frames if not _is_minus_one_point(f)]}
    for tag, fr in variants.items():
        if len(fr) >= 2:
            sub = verify_symplectic_basis(cd, fr, tolerances=tol)
            for c in sub.checks:
                rep.add(replace(c, check=f"{c.check}[minus_one_point_{tag}]"))
    block, extra = darboux_block(cfg, cd, frames, tol)
    rep.extend(block)
    extra["divisor"] = [f.point.to_dict() for f in frames]
    return rep, extra


def _emit_report(cfg: RunConfig, rep: VerificationReport, extra: dict, stem: str) -> int:
    out = _outdir(cfg)
    blob = rep.to_dict()
    blob.update(extra)
    _write_json(out / f"{stem}.json", blob)
    summary = rep.summary()
    if extra.get("warnings"):
        summary += "\n" + "\n".join("WARNING " + w for w in extra["warnings"])
    (out / f"{stem}_summary.txt").write_text(summary + "\n")
    print(summary)
    return 0 if rep.passed else 2


def cmd_verify(cfg: RunConfig) -> int:
    rep, extra = verify_all(cfg)
    return _emit_report(cfg, rep, extra, "verify")


def cmd_darboux(cfg: RunConfig) -> int:
    cd = cfg.cauchy_data()
    tol = cfg.tol()
    frames = _frames(cd, cfg, tol)
    rep, extra = darboux_block(cfg, cd, frames, tol)
    return _emit_report(cfg, rep, extra, "darboux")


def cmd_oracle(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    lams = cfg.lambda_grid()
    if lams.size == 0:
        lams = np.concatenate([np.linspace(0.5, 2.0, 20), np.exp(2j * np.pi * np.arange(20) / 20)])
    lams, delta, b = oracle_table(lams, cfg.period)
    rows = [[z.real, z.imag, d.real, d.imag, bb.real, bb.imag] for z, d, bb in zip(lams, delta, b)]
    _write_csv(out / "oracle.csv", SPECTRUM_HEADER[:6], rows)
    pts = vacuum_divisor(cfg.r_min, cfg.r_max, cfg.period)
    _write_json(out / "oracle_divisor.json",
                [{"lambda": [z.real, z.imag], "mu": [m.real, m.imag]} for z, m in pts])
    return 0


COMMANDS = {"spectrum": cmd_spectrum, "divisor": cmd_divisor, "verify": cmd_verify,
            "darboux": cmd_darboux, "oracle": cmd_oracle}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sinhg", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON RunConfig file")
    ap.add_argument("--period", type=float)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--window", type=float, nargs=2, metavar=("R_MIN", "R_MAX"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--data", help="builtin data name")
    ap.add_argument("--params", help="JSON parameters for the builtin data")
    ap.add_argument("--samples", help="samples file instead of builtin data")
    ap.add_argument("--max-points", type=int, dest="max_points")
    for name in Tolerances.__dataclass_fields__:
        ap.add_argument(f"--tol-{name.replace('_', '-')}", type=float, dest=f"tol_{name}")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except SinhGError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc), "exit_code": 4}), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
