"""Numerical tolerances and integrator settings shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError


@dataclass(frozen=True)
class Tolerances:
    ode: float = 1e-10
    det: float = 1e-10
    identity: float = 1e-8
    root: float = 1e-12
    classify: float = 1e-8
    # simplicity threshold is simple_rel * median |d_lambda b| over the located points
    simple_rel: float = 1e-8
    merge: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ConfigError(f"tolerance {f.name} must be positive")

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **{k: float(v) for k, v in kw.items() if v is not None})


@dataclass(frozen=True)
class IntegratorSettings:
    """Gauss-Legendre collocation with ``stages`` stages (order 2*stages)."""

    substeps: int = 2
    stages: int = 4
    chunk: int = 32

    def __post_init__(self):
        if self.substeps < 1 or self.stages < 1 or self.chunk < 1:
            raise ConfigError("integrator settings must be positive integers")

    def refined(self) -> "IntegratorSettings":
        return replace(self, substeps=2 * self.substeps)


DEFAULT_TOL = Tolerances()
DEFAULT_INTEGRATOR = IntegratorSettings()
