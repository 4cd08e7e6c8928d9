"""Exception taxonomy shared across the engine.

Kept in one flat module so domain modules never import each other just to
raise a common error.
"""


class ArenaError(Exception):
    """Base class for every error raised by this package."""


# --- gateway ---------------------------------------------------------------

class GatewayError(ArenaError):
    """Base class for transport and provider failures."""


class AuthError(GatewayError):
    """Credential env var missing or rejected by the provider."""


class RateLimitedError(GatewayError):
    """Provider refused the call for rate reasons after retries."""


class ProviderError(GatewayError):
    """Provider returned a non-retryable error, or no scripted reply exists."""


class FetchError(GatewayError):
    """Page fetch failed: HTTP error, timeout, robots exclusion, bad URL."""


class MalformedResponseError(GatewayError):
    """Provider payload could not be decoded into the expected shape."""


# --- infotree ----------------------------------------------------------------

class TreeError(ArenaError):
    """Base class for tree construction and traversal errors."""


class UnknownNodeError(TreeError):
    """Node id not present in the tree."""


class RootOnlyTreeError(TreeError):
    """Operation needs at least one non-root node."""


class NoFetchableRootError(TreeError):
    """No search hit fetched successfully with enough outbound links."""


# --- taskgen -----------------------------------------------------------------

class TaskError(ArenaError):
    """Base class for task generation failures."""


class PromptAssemblyError(TaskError):
    """Template placeholder left unfilled or required context empty."""


class TaskParseError(TaskError):
    """Examiner reply was not a valid task payload.

    ``reason`` is one of: malformed-json, missing-field, empty-checklist.
    """

    def __init__(self, message: str, reason: str = "malformed-json"):
        super().__init__(message)
        self.reason = reason


class LintError(TaskError):
    """Generated question leaks source-document identity."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class ExpansionExhaustedError(TaskError):
    """Tree cannot supply the sibling cohort the current width demands."""


# --- adjudicate ----------------------------------------------------------------

class VerdictParseError(ArenaError):
    """Judge reply was not a valid verdict payload.

    ``reason`` is one of: malformed-json, missing-field, unknown-enum,
    inconsistent-fields.
    """

    def __init__(self, message: str, reason: str = "malformed-json"):
        super().__init__(message)
        self.reason = reason


# --- rating --------------------------------------------------------------------

class RatingError(ArenaError):
    """Base class for rating-math failures."""


class DisconnectedGraphError(RatingError):
    """Comparison graph is not connected; Bradley-Terry fit is unidentified."""


class ConvergenceError(RatingError):
    """Iterative fit did not converge within the iteration budget."""


class DegenerateDataError(RatingError):
    """Too few points or zero variance for the requested statistic."""


# --- tournament ------------------------------------------------------------------

class PairingError(ArenaError):
    """No legal pairing exists for the round."""


# --- matchlog ----------------------------------------------------------------------

class LogError(ArenaError):
    """Match log could not be read or written."""


class SchemaVersionError(LogError):
    """Log file declares a schema version this build does not understand."""
