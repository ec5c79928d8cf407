"""Exception types shared across the solver modules."""

__all__ = [
    "DiracBagError",
    "NumericsError",
    "ConsistencyError",
    "LevelTrackingError",
]


class DiracBagError(Exception):
    """Base class for solver-specific failures."""


class NumericsError(DiracBagError):
    """A numerical routine failed hard (integration, eigensolve, ...)."""


class ConsistencyError(DiracBagError):
    """An internal cross-check failed (e.g. level count vs analytic)."""


class LevelTrackingError(DiracBagError):
    """Levels could not be matched unambiguously between two spectra."""
