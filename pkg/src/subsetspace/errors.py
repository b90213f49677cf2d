"""Exception types raised across the package.

Plain argument problems (wrong shapes, mismatched norms, out-of-range
parameters) raise :class:`ValueError` directly; the classes below mark the
domain-specific failures callers may want to catch separately.
"""


class DomainError(ValueError):
    """Input lies outside the set where the operation is defined."""


class NotUniqueError(DomainError):
    """The requested object is not unique for this norm (p = 1 or p = inf)."""


class CapacityError(ValueError):
    """A construction would leave the ambient space X(n)."""


class PreconditionError(ValueError):
    """A documented precondition on the input does not hold."""


class NonConvergenceError(RuntimeError):
    """An iterative routine stopped before meeting its stopping rule."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
