"""Exception hierarchy shared by the arithmetic and q-Euler modules."""

from typing import Any, Optional


class QEulerError(Exception):
    """Base class for every error raised by this project."""


class DomainError(QEulerError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceDomainError(DomainError):
    """A p-adic series or q-power was requested outside its convergence disc."""


class PrecisionError(DomainError):
    """The available p-adic precision is insufficient for the request."""


class CharacterError(DomainError):
    """A Dirichlet character value table violates one of its defining identities."""


class UnsupportedValueError(DomainError):
    """A character value cannot be realized in the active scalar backend."""


class IndeterminateDivisionError(QEulerError, ZeroDivisionError):
    """Division by an element that is zero at its precision."""


class GrammarError(DomainError):
    """Command-line input could not be parsed."""

    def __init__(self, message: str, position: int = 0):
        """
        Initialize the grammar error.

        Args:
            message: What went wrong
            position: Zero-based offset in the input where parsing stopped
        """
        super().__init__(f"{message} (position {position})")
        self.position = position


class NotConvergedError(QEulerError):
    """Riemann sums did not stabilize within the level cap."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial
