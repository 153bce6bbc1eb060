"""Exception types shared across the package."""

from __future__ import annotations


class InvalidArgumentError(ValueError):
    """A parameter is outside its admissible range."""


class InconsistencyError(ValueError):
    """Stencil weights do not sum to one, so no transition table exists."""


class UnsupportedProblemError(ValueError):
    """No exact solution is available for this law/profile combination."""


class StabilityError(RuntimeError):
    """Raised in strict mode when a scheme has a negative transition weight.

    The offending :class:`~probflux.markov.StabilityReport` is kept on
    ``report`` so callers can serialize it.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
