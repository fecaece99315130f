"""Exception hierarchy shared by all pipeline stages."""


class CommentScopeError(Exception):
    """Base class for every error raised by this package."""


class MalformedInputError(CommentScopeError, ValueError):
    """A user-supplied value (ID, URL, query, flag) could not be parsed."""


# -- data problems ---------------------------------------------------------

class DataError(CommentScopeError):
    """Input data is readable but unusable."""


class SnapshotParseError(DataError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class InvariantViolation(DataError):
    def __init__(self, message, comment_id=None):
        self.comment_id = comment_id
        if comment_id is not None:
            message = f"{message} (comment_id={comment_id!r})"
        super().__init__(message)


class EmptyInputError(DataError, ValueError):
    pass


class DimensionMismatchError(DataError, ValueError):
    pass


class AnonymizationCollision(DataError):
    pass


class GraphError(DataError):
    pass


# -- solver problems -------------------------------------------------------

class SolverError(CommentScopeError):
    pass


class DegenerateResponseError(SolverError):
    """The response vector is constant, so there is nothing to fit."""


class SingularSystemError(SolverError):
    """The weighted least-squares system is numerically rank deficient."""


# -- transport problems ----------------------------------------------------

class ApiError(CommentScopeError):
    def __init__(self, message, status=None, reason=None):
        self.status = status
        self.reason = reason
        super().__init__(message)


class AuthRejectedError(ApiError):
    pass


class QuotaExhaustedError(ApiError):
    pass


class TransportError(ApiError):
    pass


class TruncatedPageError(ApiError):
    pass
