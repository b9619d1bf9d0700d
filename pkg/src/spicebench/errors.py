"""Shared exception base classes.

Every domain failure raised by this package derives from SpicebenchError so
callers (notably the CLI) can distinguish domain errors from bugs.
"""


class SpicebenchError(Exception):
    """Base class for all domain errors raised by spicebench."""


class DomainError(SpicebenchError):
    """A caller violated a documented precondition (bad argument ranges etc.)."""
