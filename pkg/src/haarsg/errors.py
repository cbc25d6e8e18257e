"""Exception types shared across the package."""


class HaarsgError(Exception):
    """Base class for all package errors."""


class BasisError(HaarsgError):
    """Invalid basis construction parameters or matrices."""


class AdmissibilityError(HaarsgError):
    """A state left the admissible set of the requested operation.

    ``index`` identifies the offending stochastic cell; ``where`` may carry
    grid-cell coordinates when raised from a field evaluation.
    """

    def __init__(self, message, index=None, where=None):
        super().__init__(message)
        self.index = index
        self.where = where


class SolverAbort(HaarsgError):
    """Time integration aborted (admissibility lost mid-run)."""

    def __init__(self, message, time=None, stage=None, cause=None):
        super().__init__(message)
        self.time = time
        self.stage = stage
        self.cause = cause


class ConfigError(HaarsgError):
    """Configuration text failed to parse or validate."""

    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key
