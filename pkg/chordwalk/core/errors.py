"""
Errors
──────
Exception hierarchy shared by every service.

Library code raises these; only chordwalk.main turns them into exit codes.

Usage:
    from chordwalk.core.errors import DomainError
    raise DomainError(f"m={m} outside [3, {n - 1}]")
"""


class ChordWalkError(Exception):
    """Base for all errors raised by chordwalk."""


class DomainError(ChordWalkError, ValueError):
    """An argument lies outside the range an operation accepts."""


class ConvergenceError(ChordWalkError, RuntimeError):
    """An iterative method hit its iteration cap."""


class RootCountError(ChordWalkError, RuntimeError):
    """The determinant-equation solver did not recover exactly N roots."""

    def __init__(self, expected: int, found: int, detail: str = ""):
        self.expected = expected
        self.found = found
        message = f"expected {expected} roots, found {found}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class DegenerateBasisError(ChordWalkError, ArithmeticError):
    """The reconstruction denominator c1 vanishes at this root."""
