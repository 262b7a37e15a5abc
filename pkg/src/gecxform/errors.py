"""Shared exception types."""


class FormatError(ValueError):
    """Raised when an input file does not conform to its documented format.

    The CLI maps this to exit code 2.
    """
