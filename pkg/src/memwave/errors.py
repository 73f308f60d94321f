"""Exception types shared across the package.

Everything user-facing funnels into one of these so the command line
layer can map failures onto stable exit codes without inspecting
messages.
"""


class MemwaveError(Exception):
    """Base class for all package errors."""


class DomainError(MemwaveError, ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class DataError(MemwaveError, ValueError):
    """Array input with the wrong shape, length, or non-finite entries."""


class ConfigError(MemwaveError, ValueError):
    """A run configuration file failed to parse or validate."""


class IntegrityError(MemwaveError, RuntimeError):
    """A persisted record is corrupt or inconsistent with its address."""


class CertificateError(MemwaveError, RuntimeError):
    """A blow-up certificate was requested where the hypotheses fail."""
