"""Exception hierarchy shared by all repairdb layers.

Unification failure, store inconsistency and derivation failure are ordinary
return values (``None`` or a ``Failure`` outcome). The classes here are for
malformed input and misuse.
"""

from __future__ import annotations

from typing import Any


class RepairError(Exception):
    """Base class of every error raised by repairdb."""


class ProblemSyntaxError(RepairError):
    """A problem file could not be parsed.

    Args:
        message (str): Human readable description.
        line (int): 1-based line of the offending position.
        column (int): 1-based column of the offending position.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class SchemaError(RepairError):
    """Arity clashes, undeclared predicates, unknown sources or bad timestamps."""


class TransformError(RepairError):
    """A constraint cannot be brought into the non-recursive denial fragment."""


class SubstitutionError(RepairError, ValueError):
    """A substitution would capture a universally quantified variable."""


class FlounderingError(RepairError):
    """The derivation selected a negative literal over universal variables."""

    def __init__(self, goal: Any):
        self.goal = goal
        super().__init__(f"derivation floundered on {goal}")


class OracleError(RepairError):
    """The model oracle cannot handle the problem, or its two routes disagree."""
