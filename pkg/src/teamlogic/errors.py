"""Shared exception types."""


class LogicError(Exception):
    """Base class for errors raised by this package."""


class ParseError(LogicError):
    """Syntax error, annotated with a source position when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ScopeError(LogicError):
    """A variable is missing from the scope it is needed in."""


class SearchSpaceError(LogicError):
    """A search space exceeds its configured hard cap."""


class BudgetExceededError(LogicError):
    """An evaluation search ran out of its candidate budget."""
