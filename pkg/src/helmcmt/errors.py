"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(ValueError):
    """A request exceeds a configured implementation limit."""


class SolverError(RuntimeError):
    """A root finder, quadrature or linear solve failed to converge."""


class ModeSetFormatError(ValueError):
    """A mode-set or configuration file violates its schema."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
