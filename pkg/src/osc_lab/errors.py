"""Exception types shared across the package."""


class DomainError(ValueError):
    """An interval is not contained in the domain of a step function."""


class EvaluationError(ArithmeticError):
    """A pointwise function produced a non-finite value."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class PreconditionError(ValueError):
    """The hypothesis of a check does not hold, so the check has no verdict."""
