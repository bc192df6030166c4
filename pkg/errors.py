from typing import Any, Optional


class DynamicsError(Exception):
    """Base error for numerical failures; carries a diagnostic and partial results."""

    def __init__(self, detail: str, partial: Optional[Any] = None):
        super().__init__(detail)
        self.detail = detail
        self.partial = partial


class ConvergenceError(DynamicsError):
    def __init__(self, detail: str, iterations: int = 0, partial: Optional[Any] = None):
        super().__init__(detail, partial)
        self.iterations = iterations


class NotInBasinError(ConvergenceError):
    pass


class DomainError(DynamicsError):
    pass


class ClassificationError(DynamicsError):
    """Point is not fixed, or has the wrong class for the requested construction."""


class IdentityIterateError(DynamicsError):
    pass


class DegreeOverflowError(DynamicsError):
    pass


class CertificateError(DynamicsError):
    pass


class PrecisionError(DynamicsError):
    def __init__(self, detail: str, depth: int = 0, partial: Optional[Any] = None):
        super().__init__(detail, partial)
        self.depth = depth


class ScheduleError(DynamicsError):
    pass


class ExpressionError(DynamicsError):
    """Syntax error in a map expression, with the offending column."""

    def __init__(self, detail: str, position: int = 0):
        super().__init__(f"{detail} at position {position}")
        self.position = position


USAGE_ERRORS = (ExpressionError, ScheduleError, ValueError, KeyError)


def exit_code(exc: Optional[BaseException]) -> int:
    if exc is None:
        return 0
    if isinstance(exc, USAGE_ERRORS):
        return 1
    return 2
