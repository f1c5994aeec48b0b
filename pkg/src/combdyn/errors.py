"""Exception hierarchy shared by every module."""

import os

DEFAULT_CAP = 10**6


def default_cap():
    """Exploration cap, overridable through the COMBDYN_CAP environment variable."""
    raw = os.environ.get("COMBDYN_CAP")
    if raw is None:
        return DEFAULT_CAP
    return int(raw)


class CombDynError(Exception):
    pass


class DomainError(CombDynError, ValueError):
    """Input outside the domain an operation accepts."""


class DimensionError(DomainError):
    pass


class ContractError(CombDynError, ValueError):
    """Caller broke a documented precondition."""


class ValidationError(ContractError):
    pass


class ResourceError(CombDynError):
    """An exploration cap was hit before the search finished."""

    def __init__(self, what, cap):
        super().__init__(f"{what}: exploration cap of {cap} exceeded (raise it with COMBDYN_CAP)")
        self.cap = cap


class InvariantViolation(CombDynError, AssertionError):
    """A result the mathematics guarantees was not produced; indicates a bug."""


class CannotDesynchronize(ContractError):
    """Walk surgery needs at least two distinct prime factors."""


class CriticalItinerary(ContractError):
    """Some iterate of the point is a breakpoint, so its itinerary is ambiguous."""
