"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ConvergenceError(RuntimeError):
    """An iterative procedure did not reach its target accuracy."""
