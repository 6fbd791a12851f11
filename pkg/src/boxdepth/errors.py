"""Exception types shared across the package."""

from __future__ import annotations


class BoxdepthError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolationError(BoxdepthError, ValueError):
    """An operation was called with arguments violating its contract
    (dimension mismatch, non-slab input, accumulator overflow, ...)."""


class ParseError(BoxdepthError, ValueError):
    """An input document could not be parsed; ``field`` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnknownKindError(BoxdepthError, ValueError):
    """An instance-generator kind that this package does not provide."""


class BudgetExceededError(BoxdepthError, RuntimeError):
    """The brute-force oracle refused an instance whose compressed grid
    exceeds the cell budget; retry with smaller n or d."""


class UndefinedResultError(BoxdepthError, ArithmeticError):
    """A derived quantity is mathematically undefined for this input
    (e.g. depth probabilities of an all-zero distribution)."""


class ReductionIntegrityError(BoxdepthError, RuntimeError):
    """The matrix-product reduction could not calibrate or validate its
    depth-index layout."""
