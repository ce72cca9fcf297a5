"""Exception hierarchy shared across the package."""


class LioError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(LioError, ValueError):
    """An argument violates a documented precondition."""


class IllConditionedDataError(LioError):
    """The data covariance could not be factorized.

    ``pair`` holds the indices of the two closest training points, which are
    almost always the culprit.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NumericError(LioError):
    """A determinant or variance that must be positive was not."""

    def __init__(self, message, candidate=None):
        super().__init__(message)
        self.candidate = candidate


class ExhaustedCandidatesError(LioError):
    """Every candidate point has already been observed."""


class ResourceLimitError(LioError):
    """A requested sample would exceed the configured size cap."""


class OracleError(LioError):
    """The black-box oracle returned something other than a finite number."""
