"""Error types shared across the workbench.

Every raised error carries a stable machine-readable ``code`` so the CLI and
the HTTP API can surface it in the standard envelope without string matching.
Validation *violations* are not errors: they are returned as data by
``frames.validate_frame``.
"""

from __future__ import annotations


class BioinvertError(Exception):
    """Base class; ``code`` is the machine-readable identifier."""

    code = "ERROR"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, **self.details}


class SchemaError(BioinvertError):
    """Malformed document; ``path`` points at the offending field."""

    code = "SCHEMA_ERROR"

    def __init__(self, message: str, path: str = "/", **details):
        super().__init__(message, path=path, **details)
        self.path = path


class ConflictingEnvironmentError(BioinvertError):
    code = "CONFLICTING_ENVIRONMENT"


class EmptyDocumentError(BioinvertError):
    code = "EMPTY_DOCUMENT"


class InsufficientCorpusError(BioinvertError):
    code = "INSUFFICIENT_CORPUS"


class MaxRoundsExceededError(BioinvertError):
    code = "MAX_ROUNDS_EXCEEDED"


class ClassifierUnavailableError(BioinvertError):
    code = "CLASSIFIER_UNAVAILABLE"


class AuthError(BioinvertError):
    code = "AUTH_ERROR"


class RateLimitedError(BioinvertError):
    code = "RATE_LIMITED"

    def __init__(self, message: str = "", retry_after: float | None = None, **details):
        super().__init__(message, **details)
        self.retry_after = retry_after


class SchemaRejectedError(BioinvertError):
    code = "SCHEMA_REJECTED"


class TransportError(BioinvertError):
    code = "TRANSPORT_ERROR"


class KbEmptyError(BioinvertError):
    code = "KB_EMPTY"


class NotAVerbError(BioinvertError):
    code = "NOT_A_VERB"


class MissingDimensionError(BioinvertError):
    code = "MISSING_DIMENSION"

    def __init__(self, missing, **details):
        self.missing = tuple(missing)
        names = ", ".join(d.value for d in self.missing)
        super().__init__(f"no sentence labeled: {names}", **details)


class MissingVerdictError(BioinvertError):
    code = "MISSING_VERDICT"


class BadRatioError(BioinvertError):
    code = "BAD_RATIO"


class LengthMismatchError(BioinvertError):
    code = "LENGTH_MISMATCH"


class NoDiscriminationError(BioinvertError):
    code = "NO_DISCRIMINATION"


class NoAlternativesError(BioinvertError):
    code = "NO_ALTERNATIVES"


class MissingManualScoreError(BioinvertError):
    code = "MISSING_MANUAL_SCORE"

    def __init__(self, alternative: str, criterion: str):
        super().__init__(
            f"missing manual score for {alternative!r} on {criterion!r}",
            alternative=alternative,
            criterion=criterion,
        )


class KOutOfRangeError(BioinvertError):
    code = "K_OUT_OF_RANGE"


class StageOrderViolationError(BioinvertError):
    code = "STAGE_ORDER_VIOLATION"


class VersionMismatchError(BioinvertError):
    code = "VERSION_MISMATCH"


class IoError(BioinvertError):
    code = "IO_ERROR"
