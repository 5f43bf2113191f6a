"""Exception hierarchy.

The CLI maps these onto exit codes: input errors exit 2, budget errors
exit 3, invariant failures exit 4.
"""

from __future__ import annotations


class HodgecycError(Exception):
    exit_code = 1


class InputError(HodgecycError, ValueError):
    """Malformed input document or violated precondition on user data."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class BudgetError(HodgecycError):
    """A requested computation exceeds the configured size budget."""

    exit_code = 3

    def __init__(self, message: str, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"{message} (required {required}, budget {budget})")


class InvariantError(HodgecycError, AssertionError):
    """An algebraic identity that must hold exactly was violated."""

    exit_code = 4


class ContainmentError(InvariantError):
    """span(boundaries) is not contained in span(cycles)."""

    def __init__(self, message: str, witness: int):
        self.witness = witness
        super().__init__(f"{message} (witness column {witness})")


class WellDefinednessError(InvariantError):
    """A linear map does not descend to the requested subquotients."""

    def __init__(self, message: str, witness: dict):
        self.witness = witness
        super().__init__(message)


class NotNilpotentError(InputError):
    pass


class NotSurjectiveError(InputError):
    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(f"chain map is not surjective in degree {degree}")


class UnboundedError(InputError):
    pass
