"""Exception types shared across the package."""


class ReplSimError(Exception):
    """Base class for all errors raised by replsim."""


class ParseError(ReplSimError, ValueError):
    """Malformed policy name, access sequence or event configuration."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class ValidationError(ReplSimError, ValueError):
    """Syntactically valid input describing an impossible configuration."""


class PolicyStateError(ReplSimError):
    """A policy reached a state for which its behavior is undefined."""


class OracleError(ReplSimError):
    """A hit/miss oracle failed to evaluate a query."""


class InconsistentOracle(OracleError):
    """Repeated identical probes gave different answers."""


class NotPermutation(ReplSimError):
    """Probing results cannot be explained by any permutation policy."""


class ProbeUndistinguishing(ReplSimError):
    """No probe sequence separates the two policies under test."""


class BackendError(ReplSimError):
    """A counter backend failed while executing a benchmark."""


class EmptyInput(ReplSimError, ValueError):
    """An aggregate was requested over zero values."""
