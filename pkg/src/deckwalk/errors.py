"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class CapacityError(RuntimeError):
    """The requested computation exceeds a configured size limit."""


class ConvergenceError(ArithmeticError):
    """A numerical routine failed to reach its requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
