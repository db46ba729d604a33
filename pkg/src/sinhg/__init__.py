"""Spectral data of periodic Cauchy data for the elliptic sinh-Gordon equation.

Monodromy of the Lax operator, spectral curve and divisor, and numerical
checks of the symplectic structure in divisor coordinates.
"""

from .corpus import builtin_data, cos_perturbation, random_smooth, random_tangent, vacuum
from .fields import (CauchyData, GridFunction, PathFunction, TangentVector, make_cauchy_data,
                     poisson_bracket, symplectic_form)
from .settings import IntegratorSettings, Tolerances
from .spectral import Annulus, CharFunctions, DivisorPoint, char_functions, find_divisor, spectral_mu
from .transfer import eigen_solutions, integrate_frame, monodromy, monodromy_variation

__all__ = [
    "Annulus", "CauchyData", "CharFunctions", "DivisorPoint", "GridFunction", "IntegratorSettings",
    "PathFunction", "TangentVector", "Tolerances", "builtin_data", "char_functions", "cos_perturbation",
    "eigen_solutions", "find_divisor", "integrate_frame", "make_cauchy_data", "monodromy",
    "monodromy_variation", "poisson_bracket", "random_smooth", "random_tangent", "spectral_mu",
    "symplectic_form", "vacuum",
]
