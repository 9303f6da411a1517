"""Shared exception types."""
from __future__ import annotations


class UserInputError(ValueError):
    """Malformed spec string, invalid table, or out-of-range argument."""


class BudgetExceeded(RuntimeError):
    """A computation refused to run past its configured budget."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required
