"""Exception hierarchy shared across the package."""


class ReservingError(Exception):
    """Base class for all errors raised by fuzzyreserve."""


class InputError(ReservingError, ValueError):
    """Bad or inconsistent input data (maps to CLI exit code 2)."""


class ComputationError(ReservingError):
    """A fit or solve could not be completed (maps to CLI exit code 3)."""
