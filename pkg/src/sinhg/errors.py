"""Exception hierarchy. Each class carries the CLI exit status it maps to."""


class SinhGError(Exception):
    exit_code = 1


class ConstructionError(SinhGError, ValueError):
    """Invalid grid, period or field shape."""

    exit_code = 4


class DomainError(SinhGError, ValueError):
    """Spectral parameter outside C* (lambda = 0)."""

    exit_code = 4


class ConfigError(SinhGError, ValueError):
    exit_code = 4


class IntegrationError(SinhGError, ArithmeticError):
    exit_code = 5

    def __init__(self, message, lam=None, residual=None):
        super().__init__(message)
        self.lam = lam
        self.residual = residual


class ConsistencyError(SinhGError, ArithmeticError):
    """Two independent numerical routes disagree."""

    exit_code = 5


class IncompleteSearchError(SinhGError):
    exit_code = 5

    def __init__(self, message, winding=None, found=None):
        super().__init__(message)
        self.winding = winding
        self.found = found


class AssumptionViolation(SinhGError):
    """A divisor point is not simple (higher-order zero of b)."""

    exit_code = 3

    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class ClassificationAmbiguous(SinhGError):
    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CalibrationError(SinhGError):
    exit_code = 2


class EigenvectorNormalizationError(SinhGError, ZeroDivisionError):
    """The normalized eigenvector has a pole (divisor point)."""
