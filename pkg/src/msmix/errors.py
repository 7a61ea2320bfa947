"""Exception types raised by the library."""


class MsmixError(Exception):
    """Base class for all library errors."""


class NoBracket(MsmixError):
    """Root bracket endpoints do not enclose a sign change."""


class NoConvergence(MsmixError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class Singular(MsmixError):
    """A pivot fell below the singularity threshold."""


class NotSymmetric(MsmixError):
    """Matrix expected to be symmetric is not."""


class ZeroTotalDensity(MsmixError):
    """Total mass density vanishes; fractions are undefined."""


class NonpositiveDensity(MsmixError):
    """A density argument required to be positive is not."""


class SingularBeyondKernel(MsmixError):
    """Bordered friction matrix failed to invert; the input matrix is corrupt."""


class InvalidProfile(MsmixError):
    """Initial data violates the positivity requirements."""


class CflViolation(MsmixError):
    """Computed stable time step underflowed."""


class StateCorrupted(MsmixError):
    """NaN or Inf detected in the evolving fields."""


class AuditFailure(MsmixError):
    """Discrete energy inequality violated beyond tolerance."""

    def __init__(self, message, step=None, excess=None):
        super().__init__(message)
        self.step = step
        self.excess = excess


class ConfigError(MsmixError):
    """Scenario configuration file is invalid."""
