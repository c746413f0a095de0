"""
Errors Module
Exception hierarchy for the coopsolve library.
"""


class CoopSolveError(Exception):
    """Base class for all coopsolve errors."""


class InvalidGameError(CoopSolveError, ValueError):
    """Game parameters are invalid, or the grand coalition loses."""


class DegenerateGameError(InvalidGameError):
    """Game has no power to distribute (all-zero weights or indices)."""


class DimensionError(CoopSolveError, ValueError):
    """Vector or matrix dimensions do not match."""


class EnumerationLimitError(CoopSolveError):
    """Requested enumeration exceeds a configured cap."""


class LpSolveError(CoopSolveError):
    """A linear program did not reach an optimal solution."""

    def __init__(self, message: str, status: str = None):
        super().__init__(message)
        self.status = status


class GenerationError(CoopSolveError):
    """Game or dataset generation failed."""


class TrainingError(CoopSolveError):
    """Training diverged."""

    def __init__(self, message: str, epoch: int = None):
        super().__init__(message)
        self.epoch = epoch


class ModelInputError(CoopSolveError, ValueError):
    """Model input is non-finite, too large for the model, or degenerate."""


class IngestError(CoopSolveError):
    """Tabular input could not be ingested."""

    def __init__(self, message: str, line: int = None):
        super().__init__(message if line is None else f"{message} (line {line})")
        self.line = line


class TimingError(CoopSolveError):
    """Timings required for a speedup report are missing."""


class UnsupportedMethodError(CoopSolveError, ValueError):
    """The requested (concept, method) combination does not exist."""


class MissingModelError(CoopSolveError):
    """A driver needs a trained model that was not supplied."""
