"""Shared exception types, mapped to CLI exit codes by the command layer."""


class InputError(ValueError):
    """An argument violates a precondition (bad prime, order, residue, ...)."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured memory/work budget."""
