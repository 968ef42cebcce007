"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside its mathematically valid range."""


class NoRealRoot(RuntimeError):
    """The sixth-order accuracy conditions have no real solution at this epsilon."""


class StateError(RuntimeError):
    """An operation was invoked on an object whose state does not allow it."""


class UnsupportedBoundary(ValueError):
    """The requested boundary treatment is not implemented for this operation."""


class LengthMismatch(ValueError):
    """Arrays that must share a length do not."""
