"""Exception hierarchy shared across the toolkit.

The CLI maps these onto process exit codes: ValidationError -> 2,
DataError -> 3, NumericalError -> 4.
"""


class ToxSpanError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ToxSpanError):
    """Bad arguments, malformed configuration, or violated preconditions."""


class DataError(ToxSpanError):
    """Unreadable, malformed, or inconsistent input data."""


class NumericalError(ToxSpanError):
    """Non-finite values or diverging optimization."""
