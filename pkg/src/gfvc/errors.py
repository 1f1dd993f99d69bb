"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GFVCError(Exception):
    """Base class for all library errors."""


class DomainError(GFVCError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(GFVCError, ArithmeticError):
    """A numerical procedure could not reach its requested tolerance.

    The best available estimate and an error bound are attached so callers
    can decide whether the partial answer is still useful.
    """

    def __init__(self, message: str, best: float = float("nan"), bound: float = float("inf")) -> None:
        super().__init__(message)
        self.best = best
        self.bound = bound


class EvaluationError(GFVCError, ArithmeticError):
    """Evaluating an expression hit a division by zero or an invalid power."""

    def __init__(self, message: str, span: tuple[int, int] | None = None, source: str | None = None) -> None:
        super().__init__(message)
        self.span = span
        self.source = source


class FieldSyntaxError(GFVCError, ValueError):
    """The expression text does not match the field grammar."""

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()) -> None:
        super().__init__(f"{message} at offset {offset}" + (f" (expected one of: {', '.join(sorted(expected))})" if expected else ""))
        self.offset = offset
        self.expected = expected


class ConfigError(GFVCError, ValueError):
    """A run configuration is malformed or references something undefined."""
