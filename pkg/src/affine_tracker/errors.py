"""Exception hierarchy for the tracker.

Every error raised on purpose by the package derives from
``TrackerError``.  The concrete classes also subclass the matching
builtin (``ValueError`` / ``RuntimeError``) so callers that already
catch the builtin keep working.
"""

from __future__ import annotations


class TrackerError(Exception):
    """Base class for all tracker errors."""


class InvalidInputError(TrackerError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateWeightsError(TrackerError, ValueError):
    """Particle weights cannot form a distribution (all zero or non-finite)."""


class InvalidStateError(TrackerError, RuntimeError):
    """An operation was called before the state it needs exists."""


class FormatError(TrackerError, ValueError):
    """A file on disk does not follow its expected format.

    Attributes:
        path: The offending file, when known.
    """

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class ParseError(FormatError):
    """A malformed row in a line-oriented text file."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, path=path)
