"""Exception types shared across the package."""

from __future__ import annotations

import os


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class DivisionDomainError(DomainError):
    """A divisor interval contains zero."""


class BudgetExceeded(RuntimeError):
    """A box or tuple enumeration would exceed the configured budget."""


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class SpecFileError(ValueError):
    """Malformed set-specification document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


DEFAULT_BOX_BUDGET = 2**24


def box_budget() -> int:
    """Maximum number of boxes or tuples a single call may enumerate.

    Overridable through the ``CANTORKIT_BOX_BUDGET`` environment variable.
    """
    raw = os.environ.get("CANTORKIT_BOX_BUDGET")
    if raw is None:
        return DEFAULT_BOX_BUDGET
    return int(raw)


def check_budget(count: int, what: str = "boxes") -> None:
    limit = box_budget()
    if count > limit:
        raise BudgetExceeded(
            f"{count} {what} exceeds the budget of {limit}; lower the depth "
            "or raise CANTORKIT_BOX_BUDGET"
        )
