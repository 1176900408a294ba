"""Exception hierarchy shared across pipeline stages."""

from __future__ import annotations


class AtlasError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AtlasError):
    """Unreadable, unparseable, or structurally invalid input. Fatal for CLI stages."""


class ValidationError(AtlasError):
    """A record or dataset violates its invariants."""

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = violations or []


class ReconciliationError(AtlasError):
    """Two artifacts that must agree on identifiers do not."""

    def __init__(self, message: str, missing: list | None = None, extra: list | None = None):
        super().__init__(message)
        self.missing = missing or []
        self.extra = extra or []


class TransportError(AtlasError):
    """An external endpoint stayed unreachable after the configured retries."""


class CacheMissError(AtlasError):
    """Replay mode needed a response that the cache does not hold."""


class ResponseFormatError(AtlasError):
    """An endpoint answered, but not in the expected shape. Carries the raw text."""

    def __init__(self, message: str, raw_response: str = ""):
        super().__init__(message)
        self.raw_response = raw_response


class ProtocolError(AtlasError):
    """An endpoint broke a structural promise (e.g. inconsistent vector dimensions)."""


class DegenerateInputError(AtlasError):
    """Numerical input with no usable structure (e.g. all points identical)."""


class NumericalError(AtlasError):
    """Optimization produced non-finite values."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration
