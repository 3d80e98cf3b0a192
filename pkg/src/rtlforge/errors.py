"""Shared exception hierarchy."""


class RtlforgeError(Exception):
    """Base class for all errors raised by this package."""
