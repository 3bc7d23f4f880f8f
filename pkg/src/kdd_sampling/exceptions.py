"""Exceptions for the kdd-sampling library."""

from __future__ import annotations

from pathlib import Path
from typing import Any


class KddError(Exception):
    """Base exception for all kdd-sampling errors."""

    def __init__(self, message: str, *args: Any) -> None:
        """Initialize the exception.

        Args:
            message: The error message.
            *args: Additional arguments.
        """
        super().__init__(message, *args)
        self.message = message


class KddValidationError(KddError):
    """Raised when an operation's preconditions are not met."""


class KddDimensionError(KddValidationError):
    """Raised when operand shapes disagree."""

    def __init__(
        self,
        message: str,
        expected: tuple[int, ...] | None = None,
        actual: tuple[int, ...] | None = None,
    ) -> None:
        """Initialize the exception.

        Args:
            message: The error message.
            expected: The shape that was required.
            actual: The shape that was supplied.
        """
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class KddSizeLimitError(KddValidationError):
    """Raised when a desk-scale size guard is exceeded."""

    def __init__(self, message: str, size: int, limit: int) -> None:
        """Initialize the exception.

        Args:
            message: The error message.
            size: The requested problem size.
            limit: The largest size the operation accepts.
        """
        super().__init__(message)
        self.size = size
        self.limit = limit


class KddConvergenceError(KddError):
    """Raised when a numerical solve cannot be completed."""

    def __init__(self, message: str, condition: float | None = None) -> None:
        """Initialize the exception.

        Args:
            message: The error message.
            condition: Condition number estimate of the failing system, if known.
        """
        super().__init__(message)
        self.condition = condition


class KddFormatError(KddError):
    """Raised when a file does not follow its declared format."""

    def __init__(self, message: str, path: Path | str | None = None) -> None:
        """Initialize the exception.

        Args:
            message: The error message.
            path: The offending file.
        """
        super().__init__(message)
        self.path = path


class KddConfigError(KddError):
    """Raised when an experiment configuration fails schema validation."""


class KddConsistencyError(KddError):
    """Raised when an internal cross-check of a run fails."""
