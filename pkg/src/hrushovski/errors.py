"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HrushovskiError(Exception):
    pass


class InputError(HrushovskiError, ValueError):
    """Caller supplied data violating an operation's precondition."""


class InternalError(HrushovskiError, RuntimeError):
    """A post-construction self check failed; always a bug."""


class ResourceError(HrushovskiError):
    """The requested search exceeds the configured budget."""


class SnapshotError(HrushovskiError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class NotClosedError(HrushovskiError):
    """A base set expected to be closed is not; carries the violating extension."""

    def __init__(self, message: str, violator: frozenset[str]):
        self.violator = violator
        super().__init__(f"{message}: violating set {sorted(violator)}")
