"""Exceptions and small result types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class LLLKitError(Exception):
    """Base class for all package errors."""


class ValidationError(LLLKitError, ValueError):
    """A domain object violates one of its invariants."""


class CapExceededError(LLLKitError, RuntimeError):
    """An enumeration would exceed its configured cap."""


class PreconditionError(LLLKitError, ValueError):
    """An operation was called outside its precondition."""


class NotTransitiveError(LLLKitError, ValueError):
    def __init__(self, a, b):
        super().__init__(f"action is not transitive: point {b} is unreachable from {a}")
        self.points = (a, b)


class NormalizerError(LLLKitError, ValueError):
    """Raised when an element does not normalize the root stabilizer."""

    def __init__(self, edge, message=None):
        super().__init__(message or f"element does not normalize the stabilizer; violated edge {edge}")
        self.edge = edge


class SolverFailure(LLLKitError, RuntimeError):
    """The resampling solver gave up; ``report`` carries the details."""

    def __init__(self, report, message=None):
        super().__init__(message or f"solver failed with {report.violated} violated events "
                                    f"after {report.rounds} rounds")
        self.report = report


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verifier: ``ok`` plus an optional witness of failure.

    Truthy iff the check passed.
    """

    ok: bool
    witness: Any = None

    def __bool__(self):
        return self.ok
