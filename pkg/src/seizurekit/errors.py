"""Exception hierarchy. Everything raised on bad data derives from DataError
so callers (and the CLI) can map failures to exit codes in one place."""


class SeizureKitError(Exception):
    """Base class for all toolkit errors."""


class DataError(SeizureKitError):
    """Malformed or inconsistent input data (file contents, CSV rows, shapes)."""


class EdfFormatError(DataError):
    """EDF header violates the supported subset.

    Carries the byte offset of the offending field when known.
    """

    def __init__(self, message: str, byte_offset: int | None = None):
        if byte_offset is not None:
            message = f"{message} (header byte offset {byte_offset})"
        super().__init__(message)
        self.byte_offset = byte_offset


class EdfTruncationError(DataError):
    """EDF data region shorter than the header promises."""

    def __init__(self, expected_records: int, actual_records: int):
        super().__init__(
            f"truncated EDF data: header declares {expected_records} record(s), "
            f"file holds {actual_records} complete record(s)"
        )
        self.expected_records = expected_records
        self.actual_records = actual_records


class DegenerateScalingError(DataError):
    """digital_min == digital_max, so the EDF scaling formula is undefined."""


class UnsupportedLayoutError(DataError):
    """EDF file outside the supported subset (e.g. more than one signal)."""


class CsvRowError(DataError):
    """A CSV row failed to parse or validate; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class AnnotationOverlapError(DataError):
    """Two annotations for the same animal intersect."""


class OrderingError(DataError):
    """Timestamps out of order where a sorted sequence is required."""


class DuplicateTimestampError(DataError):
    """The same timestamp appears twice within one stream."""


class GridAlignmentError(DataError):
    """Timestamp off the stream's 10 s grid."""


class StreamAlignmentError(DataError):
    """Streams cannot be aligned (different grid phases)."""


class RateCompatibilityError(DataError):
    """window/stride seconds do not map to an integer number of samples."""


class RecordingTooShortError(DataError):
    """Recording shorter than one window."""


class NoPositiveClassError(DataError):
    """Operation requires at least one positive (or both classes) present."""


class IntervalBoundsError(DataError):
    """Interval does not fit the series it is applied to."""


class FeatureShapeError(DataError):
    """Feature vector length does not match the model."""


class NonFiniteInputError(DataError):
    """NaN or infinity where finite values are required."""


class ModelVersionError(DataError):
    """Persisted model has an unsupported format version."""


class ModelIntegrityError(DataError):
    """Persisted model is corrupt (bad magic, checksum, or truncated)."""


class ZeroWeightError(DataError):
    """All modalities present in a frame carry zero fusion weight."""


class EmptyStreamError(DataError):
    """Operation requires a non-empty prediction stream."""


class SingleClassError(DataError):
    """AUC is undefined because only one label class is present."""


class PackingError(DataError):
    """Requested seizures do not fit in the recording duration."""


class ConfigError(SeizureKitError):
    """Invalid pipeline configuration (unknown key, bad value, missing path)."""
