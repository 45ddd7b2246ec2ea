"""Exception hierarchy shared across the package."""


class ViscwaveError(Exception):
    """Base class for all package errors."""


class BracketError(ViscwaveError):
    """Root-finding target lies outside the supplied bracket."""


class DegenerateError(ViscwaveError):
    """Viscosity derivative requested where it is unbounded (power law, p < 1, v = 0)."""


class DomainError(ViscwaveError):
    """Argument outside the mathematical domain of the operation."""


class ConvergenceError(ViscwaveError):
    """An iterative solve exhausted its iteration budget."""


class WindowError(ViscwaveError):
    """Spatial window failed to capture the required fraction of the wave mass."""


class ConfigError(ViscwaveError):
    """Invalid or inconsistent run configuration."""


class BlowupError(ViscwaveError):
    """Numerical solution became non-finite or left the admissible range."""


class NegativeWeightError(ViscwaveError):
    """A weight field that must be non-negative carried negative entries."""


class PreconditionError(ViscwaveError):
    """Input violates a documented precondition of a diagnostic."""


class FitError(ViscwaveError):
    """Regression input is too short or contains non-positive values."""
