"""Shared exception types.

DataError maps to CLI exit code 2; everything argparse-shaped (bad flags,
bad parameter values) maps to exit code 1.
"""


class DataError(Exception):
    """Invalid or inconsistent project data (bad record, unknown id, empty store)."""


class ValidationError(DataError):
    """A record violates a model invariant (bad stars, span out of range, ...)."""


class ConflictError(DataError):
    """The mutation clashes with existing state (e.g. splitting an annotated
    sentence); HTTP maps this to 409."""


class StoreLockedError(DataError):
    """Another process holds the project lockfile."""
