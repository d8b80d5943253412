"""Exception taxonomy shared across the package.

Every error that can cross the service boundary maps onto exactly one
API error code; ``retryable`` is true only for transient provider
failures.
"""


class HapticRecError(Exception):
    """Base class for all package errors."""

    api_code = "internal"
    retryable = False


class SchemaValidationError(HapticRecError):
    """A record or attribute value violates the active taxonomy schema."""

    api_code = "bad_request"


class QueryError(HapticRecError):
    """A structured query references an unknown attribute or an operator
    incompatible with the attribute's value kind."""

    api_code = "bad_request"


class IngestionError(HapticRecError):
    """A source document could not be parsed or staged."""

    api_code = "bad_request"


class NotFoundError(HapticRecError):
    api_code = "not_found"


class StateError(HapticRecError):
    """An operation was applied in an illegal state, e.g. resolving the
    same review item twice."""

    api_code = "conflict"


class ConfigError(HapticRecError):
    """Startup-time configuration problem (malformed config or fixture
    file). Raised fail-fast, never per-request."""

    api_code = "internal"


class ProviderError(HapticRecError):
    """A completion/embedding provider call failed.

    ``retryable`` distinguishes transient failures (timeouts, 5xx) from
    permanent ones (auth, malformed request).
    """

    def __init__(self, message: str, *, retryable: bool):
        super().__init__(message)
        self.retryable = retryable

    @property
    def api_code(self) -> str:  # type: ignore[override]
        return "provider_unavailable" if self.retryable else "internal"
