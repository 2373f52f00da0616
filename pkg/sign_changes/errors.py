"""
Exception hierarchy for sign_changes.

Everything the package raises derives from SignChangeError, so callers can
catch one type. Estimators that can fail to converge (QMC, Monte Carlo) report
that through a status field on their result instead of raising.
"""

from typing import Optional


class SignChangeError(Exception):
    """Base class for all package errors."""


class DomainError(SignChangeError, ValueError):
    """An argument lies outside the region where the computation is defined."""


class ConvergenceError(SignChangeError):
    """An adaptive integration stopped before reaching its error target."""

    def __init__(self, message: str, value: float, error: float, detail: Optional[str] = None):
        super().__init__(message)
        self.value = value
        self.error = error
        self.detail = detail

    def to_dict(self) -> dict:
        return {
            "message": str(self),
            "value": self.value,
            "error": self.error,
            "detail": self.detail,
        }
