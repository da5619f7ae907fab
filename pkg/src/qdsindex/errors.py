"""Exception types raised by the package."""

from __future__ import annotations


class QdsError(Exception):
    """Base class for all package errors."""


class TruncationMismatch(QdsError, ValueError):
    """Two operators live on different truncated Hilbert spaces."""


class PreconditionError(QdsError, ValueError):
    """An argument violates a documented precondition."""


class FitError(QdsError, RuntimeError):
    """An asymptotic fit could not be carried out reliably."""


class WindowError(FitError):
    """The admissible fitting window is empty."""


class ConfigError(QdsError, ValueError):
    """A configuration value or command-line argument is malformed."""
