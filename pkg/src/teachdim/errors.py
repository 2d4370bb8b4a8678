"""Exception hierarchy shared by every module.

Each exception carries a short machine-readable ``reason`` code; the CLI maps
the classes onto exit codes (input problems exit 2, budget problems exit 3).
"""
from __future__ import annotations


class TeachDimError(Exception):
    reason = "error"

    def __init__(self, message: str, *, reason: str | None = None, **details):
        super().__init__(message)
        if reason is not None:
            self.reason = reason
        self.details = details


class InputError(TeachDimError, ValueError):
    """Malformed class/preference data, bad indices, inconsistent teachers."""

    reason = "input"


class InconsistentExampleError(InputError):
    reason = "inconsistent-example"


class DomainError(TeachDimError, ValueError):
    """An operation was called outside its mathematical domain."""

    reason = "domain"


class BindingError(TeachDimError, ValueError):
    """A preference function was used with a class it is not bound to."""

    reason = "binding"


class PreconditionError(TeachDimError, ValueError):
    reason = "precondition"


class ResourceError(TeachDimError):
    """A configured size cap or search budget was exceeded."""

    reason = "resource"
