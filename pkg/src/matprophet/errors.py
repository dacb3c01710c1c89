"""Shared exception types."""


class EnumerationCapError(RuntimeError):
    """An exact computation would enumerate more states than the configured
    cap allows. Raise the cap or switch to a Monte Carlo mode."""


class VerificationError(AssertionError):
    """A guarantee check that should hold numerically did not."""
