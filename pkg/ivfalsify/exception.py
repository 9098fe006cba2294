from __future__ import annotations

from pydantic import ValidationError


class IvFalsifyError(ValueError):
    """Base class for errors raised by ivfalsify."""


class SchemaError(IvFalsifyError):
    """A mapped column is missing from the input header."""


class ParseError(IvFalsifyError):
    """A data row could not be turned into a record."""

    def __init__(self, message: str, row: int | None = None) -> None:
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class EstimationError(IvFalsifyError):
    """A quantity cannot be estimated from the given counts (e.g. an empty instrument arm)."""


class DomainError(IvFalsifyError):
    """A point lies outside the domain an operation is defined on."""


class ParameterError(IvFalsifyError):
    """A numeric parameter is out of its admissible range."""


class ConfigurationError(IvFalsifyError):
    """A procedure was configured inconsistently."""


class RecordValidationError(ParseError):
    """Raised when a CSV row fails validation as a `Record`."""

    def __init__(self, row: int, validation_error: ValidationError, source: str | None = None) -> None:
        self.validation_error = validation_error
        self.source = source

        error_messages: list[str] = []
        for error in validation_error.errors():
            field = ".".join(map(str, error["loc"]))
            message = error["msg"]
            input_value = error.get("input")
            error_messages.append(f"  - Field `{field}`: {message}. Received: {repr(input_value)}")

        where = f" of `{source}`" if source else ""
        helpful_message = (
            f"Record validation failed{where}:\n"
            + "\n".join(error_messages)
            + "\n\nHint: Check the column mapping; z and d must be non-negative integers and y must be numeric."
        )
        super().__init__(helpful_message, row=row)
