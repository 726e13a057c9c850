"""Exception hierarchy shared by all risklens modules."""

from __future__ import annotations

from typing import Any


class RiskLensError(Exception):
    """Base class for every error raised by risklens."""


class DomainError(RiskLensError, ValueError):
    """An argument lies outside the domain of an operation."""


class SchemaError(DomainError):
    """A serialized document does not match the expected JSON layout."""


class NumericalFailure(RiskLensError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""


class NotLessRiskAverse(DomainError):
    """Raised when an operation needs ``u`` less risk-averse than ``v`` and it is not.

    The ``violation`` attribute carries the Pratt witness found by the
    cross-ratio scan.
    """

    def __init__(self, message: str, violation: Any = None):
        super().__init__(message)
        self.violation = violation
