"""Exception hierarchy shared by every oreach module."""

from __future__ import annotations


class OReachError(Exception):
    """Base class for all errors raised by oreach."""


class ResourceLimitError(OReachError):
    """A configured size, conflict, or iteration budget was exhausted."""


class InconclusiveError(ResourceLimitError):
    """Backward search stopped before reaching a verdict."""

    def __init__(self, message: str, iterations: int = 0):
        super().__init__(message)
        self.iterations = iterations


class MissingSymbolError(OReachError):
    """An interpretation does not cover a symbol that is being evaluated."""


class ValidationError(OReachError):
    """Input is syntactically fine but violates a well-formedness condition."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [message])


class ParseError(OReachError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<input>"):
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


class TraceVerificationError(OReachError):
    """A reconstructed unsafe trace failed re-verification (internal bug guard)."""
