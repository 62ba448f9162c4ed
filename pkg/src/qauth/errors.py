"""Exception types raised across the package.

Every error derives from :class:`QauthError` so callers can catch the whole
family at once; the leaf classes distinguish the contract that was violated.
"""


class QauthError(Exception):
    """Base class for all package errors."""


class DimensionError(QauthError, ValueError):
    """Operator dimensions are inconsistent or beyond the configured cap."""


class DomainError(QauthError, ValueError):
    """A precondition on operator content failed (non-unitary, leaky state, ...)."""


class KeyIndexError(QauthError, IndexError):
    """Key index outside the range 0..K-1 of the coding set."""


class InvalidTagError(DomainError):
    """Tag state has weight outside the valid-tag subspace."""


class LayoutError(DomainError):
    """Space dimensions are incompatible with the requested construction."""


class InsufficientFamilyError(DomainError):
    """The coding set has too few unitaries for the requested analysis."""


class DegenerateFamilyError(DomainError):
    """Single-rule coding set: the analysis is meaningless for K = 1."""


class NumericError(QauthError, RuntimeError):
    """A numerical routine failed to converge; the message carries diagnostics."""


class DegenerateBranchError(NumericError):
    """An eigenphase sits inside the guard band of the -pi branch cut."""


class GenerationError(QauthError, RuntimeError):
    """Family generation exhausted its retries.

    The last failing validation report is attached as ``last_report``.
    """

    def __init__(self, message, last_report=None):
        super().__init__(message)
        self.last_report = last_report


class InternalConsistencyError(QauthError, RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""
