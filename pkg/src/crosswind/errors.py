"""Exception types shared across the package."""


class CrosswindError(Exception):
    """Base class for all package errors."""


class InvalidBasisError(CrosswindError, ValueError):
    """Basis parameters outside the configured search box (or non-positive)."""

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class ConfigError(CrosswindError, ValueError):
    """Malformed configuration file or field."""


class SimulationFailure(CrosswindError, RuntimeError):
    """A closed-loop evaluation did not produce a usable lap.

    ``kind`` is one of ``"lap_timeout"`` or ``"divergence"``.
    """

    def __init__(self, kind, message=""):
        super().__init__(message or kind)
        self.kind = kind


class DegenerateLapError(CrosswindError, ValueError):
    """Lap has fewer than two samples or non-positive duration."""


class FactorizationError(CrosswindError, RuntimeError):
    """Kernel matrix not positive definite even after the jitter ladder."""


class OptimizationAbort(CrosswindError, RuntimeError):
    """Every initial design evaluation failed; no dataset to start from."""
