"""Exception types shared across the package.

Every error carries a machine-readable ``code`` (used verbatim in HTTP error
bodies and CLI error output) and an optional ``field`` naming the offending
column/feature.
"""

from __future__ import annotations


class EnrollcastError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

    @property
    def message(self) -> str:
        return str(self)


# dataset ingestion / cleaning
class BadCsv(EnrollcastError):
    code = "bad_csv"


class BadSchema(EnrollcastError):
    code = "bad_schema"


class MissingColumn(EnrollcastError):
    code = "missing_column"


class BadLevel(EnrollcastError):
    code = "bad_level"


class BadNumber(EnrollcastError):
    code = "bad_number"


class DuplicateKey(EnrollcastError):
    code = "duplicate_key"


class KeyMissing(EnrollcastError):
    code = "key_missing"


class EmptyAfterClean(EnrollcastError):
    code = "empty_after_clean"


class TooFewRows(EnrollcastError):
    code = "too_few_rows"


class UnknownFeature(EnrollcastError):
    code = "unknown_feature"


class MissingFeature(EnrollcastError):
    code = "missing_feature"


# model fitting / prediction
class DimensionMismatch(EnrollcastError):
    code = "dimension_mismatch"


class SingleClass(EnrollcastError):
    code = "single_class"


class Degenerate(EnrollcastError):
    code = "degenerate"


# evaluation
class LengthMismatch(EnrollcastError):
    code = "length_mismatch"


class EmptyInput(EnrollcastError):
    code = "empty"


class TooFewPerClass(EnrollcastError):
    code = "too_few_per_class"


# feature selection
class EmptySubset(EnrollcastError):
    code = "empty_subset"


class BadIndex(EnrollcastError):
    code = "bad_index"


class TooManyFeatures(EnrollcastError):
    code = "too_many_features"


# persistence / service
class NotFound(EnrollcastError):
    code = "not_found"


class CorruptModel(EnrollcastError):
    code = "corrupt_model"


class VersionUnsupported(EnrollcastError):
    code = "version_unsupported"


class JobConflict(EnrollcastError):
    code = "job_conflict"
