"""Exception hierarchy shared by every module."""

from __future__ import annotations

from typing import Any


class DualFanError(Exception):
    """Base class; carries an optional JSON-serialisable witness."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class InputError(DualFanError, ValueError):
    """Malformed or out-of-contract input (bad JSON, unknown ids, bad shapes)."""


class ViolationError(DualFanError):
    """A mathematical precondition fails for otherwise well-formed input."""
