"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidInput(ValueError):
    """An argument is structurally invalid for the requested computation."""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to reach its accuracy target."""


class UnsupportedSet(ValueError):
    """The requested set shape has no membership or measure support."""
