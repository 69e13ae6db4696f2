"""Custom exceptions for arrangement homology computations.

Every error carries a context dictionary, so a failure deep inside a lattice
or derivation computation still names the input, hyperplane or degree that
caused it.

Requires Python 3.10+
"""

from pathlib import Path
from typing import Any


def _context(**items: Any) -> dict[str, Any]:
    """Keep the items that are set."""
    return {key: value for key, value in items.items() if value is not None and value != ""}


def _text(value: Any) -> str | None:
    return None if value is None else str(value)


class ArrangementError(Exception):
    """Base exception for all arrangement errors."""

    def __init__(self, message: str, context: dict[str, Any] | None = None):
        self.message = message
        self.context = context or {}
        super().__init__(message)

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} (Context: {details})"


class FieldError(ArrangementError):
    """Non-prime characteristic, mismatched fields, or a characteristic-gated operation."""

    def __init__(self, message: str, field: str | None = None, value: Any = None):
        super().__init__(message, _context(field=field, value=_text(value)))


class ParseError(ArrangementError):
    """Arrangement text or polynomial input that cannot be parsed.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(
        self,
        message: str,
        file_path: Path | str | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        self.line = line
        self.column = column
        super().__init__(
            message, _context(file_path=_text(file_path), line=line, column=column)
        )


class ValidationError(ArrangementError):
    """Zero or proportional forms, bad multiplicities, malformed graphs or parameters."""

    def __init__(
        self,
        message: str,
        field_name: str | None = None,
        field_value: Any = None,
        expected: str | None = None,
    ):
        super().__init__(
            message,
            _context(field_name=field_name, field_value=_text(field_value), expected=expected),
        )


class PreconditionError(ArrangementError):
    """An operation called outside the inputs it is defined for (rank, TF2, boolean...)."""

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        requirement: str | None = None,
    ):
        self.operation = operation
        super().__init__(message, _context(operation=operation, requirement=requirement))


class ConfigurationError(ArrangementError):
    """An ARRH_* environment value that cannot be used."""

    def __init__(self, message: str, config_key: str | None = None, config_value: Any = None):
        super().__init__(
            message, _context(config_key=config_key, config_value=_text(config_value))
        )


def reraise_with_context(original_error: Exception, context: dict[str, Any]) -> None:
    """Re-raise an exception with additional context.

    Raises:
        ArrangementError: The original error with ``context`` merged in, or a
            wrapper around a foreign exception
    """
    if isinstance(original_error, ArrangementError):
        original_error.context.update(context)
        raise original_error
    raise ArrangementError(
        f"{type(original_error).__name__}: {original_error}", context=context
    ) from original_error
