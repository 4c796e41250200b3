"""Exception hierarchy shared by every corrmax module."""


class CorrmaxError(Exception):
    """Base class for all library errors."""


class ParseError(CorrmaxError, ValueError):
    """A text input could not be parsed.

    ``row`` is the 1-based physical line number of the offending line when
    known.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class FormatError(CorrmaxError, ValueError):
    """A binary matrix file is malformed."""


class ShapeError(CorrmaxError, ValueError):
    """Array dimensions do not satisfy an operation's requirements."""


class DomainError(CorrmaxError, ValueError):
    """A scalar argument lies outside the function's domain."""


class DegenerateColumn(CorrmaxError, ValueError):
    """A column has (numerically) zero variance, so Pearson's r is undefined."""

    def __init__(self, column, message=None):
        super().__init__(message or f"column {column} is degenerate (zero variance)")
        self.column = column


class UnsupportedError(CorrmaxError, NotImplementedError):
    """The requested distribution/operation combination is not available."""
