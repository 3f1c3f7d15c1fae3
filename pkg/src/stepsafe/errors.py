"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates an operation's preconditions."""


class DegeneratePairError(InvalidInputError):
    """A point pair is too close together for the midpoint quotient."""


class UnsupportedOperationError(InvalidInputError):
    """The requested operation is not available for this input."""


class NumericalFailureError(ArithmeticError):
    """A computation produced non-finite or otherwise unusable numbers."""
