"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class SymipsError(Exception):
    """Base class for all toolkit errors."""


class FieldMismatchError(SymipsError):
    """Operands live over different fields."""


class BudgetExceededError(SymipsError):
    """An exact expansion ran past its term-operation budget."""


class CapExceededError(SymipsError):
    """A group enumeration or automorphism search ran past its cap."""


class InvarianceError(SymipsError):
    """An axiom set is not closed under the declared group action."""


class MalformedInputError(SymipsError):
    """A workspace file or argument does not match its schema."""
