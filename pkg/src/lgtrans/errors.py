"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments outside the domain of a function or state type."""


class NumericError(ArithmeticError):
    """A series or quadrature failed to converge."""
