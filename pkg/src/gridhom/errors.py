"""Exception types shared across the package."""

from __future__ import annotations


class ContractViolation(ValueError):
    """An operation was called outside its documented preconditions."""


class HypothesisError(ContractViolation):
    """A colorful instance does not satisfy the colorful Helly hypotheses."""


class ResourceLimitError(RuntimeError):
    """A search or enumeration exceeded its configured budget.

    ``partial`` carries whatever was computed before the abort so callers
    can still emit a report.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class VerificationFailure(AssertionError):
    """A certificate did not re-verify; ``counterexample`` is replayable."""

    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class MalformedInput(ContractViolation):
    """Input that does not parse or does not match the expected JSON shape."""
