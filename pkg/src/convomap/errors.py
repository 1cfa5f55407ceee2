"""Exception hierarchy shared across the engine, service, and CLI."""

from __future__ import annotations


class ConvomapError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ConvomapError):
    """Export bytes are not syntactically valid (carries line/column)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ExportSchemaError(ConvomapError):
    """Export parsed but violates the documented schema."""


class StructuralError(ConvomapError):
    """Message sequence cannot be paired into conversation nodes."""


class ArgumentError(ConvomapError, ValueError):
    """An operation was called with arguments outside its contract."""


class ProviderError(ConvomapError):
    """An embedding or LLM provider failed."""

    def __init__(self, message: str, retryable: bool = False):
        self.retryable = retryable
        super().__init__(message)


class CapacityError(ConvomapError):
    """Instance exceeds the exact solver's size limit; use the heuristic."""


class BudgetError(ConvomapError):
    """A context bundle exceeds the token budget."""

    def __init__(self, total_tokens: int, budget: int):
        self.total_tokens = total_tokens
        self.budget = budget
        self.overshoot = total_tokens - budget
        super().__init__(
            f"context is {self.overshoot} tokens over budget "
            f"({total_tokens} > {budget})"
        )


class NotFoundError(ConvomapError):
    """Requested conversation, topic, or node does not exist."""


class StateError(ConvomapError):
    """Operation requires analysis that has not run yet."""
