"""Shared error types."""


class ResourceBoundError(RuntimeError):
    """An exhaustive computation would exceed its configured size bound."""
