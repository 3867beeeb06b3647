#!/usr/bin/env python3
"""
Exception types for the superdense coding simulator
"""


class SdcError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(SdcError, ValueError):
    """Raised when an argument violates a precondition.

    Dimension mismatches, tolerances exceeded on input states, epsilon
    outside (0, 1] and similar problems all end up here. Subclasses
    ``ValueError`` so callers that only know the built-in still catch it.
    """


class InputError(SdcError):
    """Raised when an external input (a state file) cannot be parsed."""

    def __init__(self, msg: str, path: str = ""):
        super().__init__(msg)
        self.path = path


class ReportWriteError(SdcError, OSError):
    """Raised when a report cannot be written to its destination."""
