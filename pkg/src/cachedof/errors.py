"""Exception types shared across the package."""


class NotPrimePowerError(ValueError):
    """Requested field order is not a prime power."""


class AmbientMismatchError(ValueError):
    """Operands live in different ambient spaces (k or q differ)."""


class ConstraintViolationError(ValueError):
    """Scheme parameters violate a dimensional constraint.

    The message names the violated inequality.
    """


class NonIntegerCountError(ArithmeticError):
    """A closed-form count failed an exact divisibility check.

    This signals an implementation bug, not bad user input.
    """


class InvalidDemandError(ValueError):
    """Demand vector is malformed or references an unknown file."""


class PreconditionFailedError(ValueError):
    """Round does not satisfy the zero-forcing precondition."""


class IllConditionedError(ArithmeticError):
    """Channel submatrix condition number exceeds the solve guard."""


class InconsistentScheduleError(RuntimeError):
    """Observed per-round service count differs from the closed-form DoF."""
