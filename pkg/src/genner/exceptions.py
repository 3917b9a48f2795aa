"""Exception hierarchy shared by every module of the package."""


class GennerError(Exception):
    """Base class for all errors raised by this package."""


class NotLaminar(GennerError, ValueError):
    """Raised when a span family contains two partially overlapping spans."""


class UnknownLabel(GennerError, KeyError):
    """Raised when a label is not part of the label schema in use."""

    def __str__(self):
        return Exception.__str__(self)


class InvalidSpan(GennerError, ValueError):
    """Raised when a span violates its offset invariants."""


class MentionNotFound(GennerError, LookupError):
    """Raised when a mention string has fewer occurrences than requested."""


class SchemaViolation(GennerError, ValueError):
    """A corpus record violates the file schema.

    ``line`` is the 1-based line number in the offending file, when known.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class EncodingError(GennerError, UnicodeError):
    """Raised when an input file is not valid UTF-8."""


class MismatchedIds(GennerError, KeyError):
    """Raised when predictions reference sentence ids absent from the gold corpus."""

    def __str__(self):
        return Exception.__str__(self)


class AlphabetTooSmall(GennerError, ValueError):
    """Raised when a symbol alphabet has fewer symbols than the schema has labels."""
