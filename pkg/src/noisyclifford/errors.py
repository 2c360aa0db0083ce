"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class NoisyCliffordError(Exception):
    """Base class for all package errors."""


class CapExceededError(NoisyCliffordError, ValueError):
    """A problem size exceeds a configured desk-scale cap."""

    def __init__(self, what: str, value: int, limit: int):
        self.what = what
        self.value = value
        self.limit = limit
        super().__init__(f"{what}={value} exceeds the configured cap of {limit}")


class NumericalError(NoisyCliffordError, ArithmeticError):
    """A numerical routine failed or produced an uncertified result."""


class InfeasibleError(NumericalError):
    """Linear program has no feasible point."""


class UnboundedError(NumericalError):
    """Linear program objective is unbounded below."""


class FitError(NumericalError):
    """Least-squares fit failed to produce usable parameters."""


def check_cap(what: str, value: int, limit: int) -> None:
    """Raise CapExceededError when value > limit."""
    if value > limit:
        raise CapExceededError(what, value, limit)
