"""CSV formats: seizure annotations and per-modality prediction streams.

annotations.csv          header `animal_id,start_time,duration_s`
predictions_<mod>.csv    header `timestamp,probability`

Timestamps are ISO 8601 UTC (`2024-01-01T00:02:10Z`). Lines starting with
`#` are comments and are skipped (the CLI stamps a config hash that way).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import AnnotationOverlapError, CsvRowError, DataError, GridAlignmentError
from .types import (
    GRID_STEP_S,
    PredictionStream,
    SeizureAnnotation,
    format_probability,
    format_utc,
    from_unix,
    parse_utc,
    to_unix,
)

ANNOTATION_HEADER = "animal_id,start_time,duration_s"
STREAM_HEADER = "timestamp,probability"


def _data_lines(path: str | Path, expected_header: str) -> list[tuple[int, str]]:
    """Return (1-based line number, stripped text) for data rows, validating the header."""
    try:
        lines = Path(path).read_text(encoding="ascii").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not ASCII text: {exc}") from None
    rows: list[tuple[int, str]] = []
    header_seen = False
    for no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if not header_seen:
            if text != expected_header:
                raise CsvRowError(no, f"expected header {expected_header!r}, got {text!r}")
            header_seen = True
            continue
        rows.append((no, text))
    if not header_seen:
        raise CsvRowError(1, f"missing header {expected_header!r}")
    return rows


def read_annotations(path: str | Path) -> list[SeizureAnnotation]:
    """Parse annotations, sorted by (animal_id, start_time).

    Overlapping annotations for the same animal are rejected, naming both rows.
    """
    parsed: list[tuple[SeizureAnnotation, int]] = []
    for no, text in _data_lines(path, ANNOTATION_HEADER):
        parts = text.split(",")
        if len(parts) != 3:
            raise CsvRowError(no, f"expected 3 fields, got {len(parts)}")
        animal_id, start_text, dur_text = (p.strip() for p in parts)
        if not animal_id:
            raise CsvRowError(no, "empty animal_id")
        try:
            start = parse_utc(start_text)
        except Exception as exc:
            raise CsvRowError(no, str(exc)) from None
        try:
            duration = int(dur_text)
        except ValueError:
            raise CsvRowError(no, f"duration_s is not an integer: {dur_text!r}") from None
        if duration < 1:
            raise CsvRowError(no, f"duration_s must be positive, got {duration}")
        parsed.append((SeizureAnnotation(animal_id, start, duration), no))

    parsed.sort(key=lambda item: (item[0].animal_id, item[0].start_unix))
    for (a, line_a), (b, line_b) in zip(parsed, parsed[1:]):
        if a.animal_id == b.animal_id and b.start_unix < a.end_unix:
            raise AnnotationOverlapError(
                f"annotations overlap for {a.animal_id!r}: "
                f"line {line_a} ([{format_utc(a.start_time)} +{a.duration_s}s]) and "
                f"line {line_b} ([{format_utc(b.start_time)} +{b.duration_s}s])"
            )
    return [a for a, _ in parsed]


def write_annotations(
    annotations: list[SeizureAnnotation],
    path: str | Path,
    header_comment: str | None = None,
) -> None:
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(ANNOTATION_HEADER)
    for a in sorted(annotations, key=lambda x: (x.animal_id, x.start_unix)):
        lines.append(f"{a.animal_id},{format_utc(a.start_time)},{a.duration_s}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_prediction_stream(path: str | Path, modality: str) -> PredictionStream:
    """Parse a prediction stream, validating probability bounds, strict
    timestamp ordering, and 10 s grid alignment row by row."""
    timestamps: list[int] = []
    probs: list[float] = []
    first_phase: int | None = None
    for no, text in _data_lines(path, STREAM_HEADER):
        parts = text.split(",")
        if len(parts) != 2:
            raise CsvRowError(no, f"expected 2 fields, got {len(parts)}")
        ts_text, prob_text = (p.strip() for p in parts)
        try:
            ts = to_unix(parse_utc(ts_text))
        except Exception as exc:
            raise CsvRowError(no, str(exc)) from None
        try:
            prob = float(prob_text)
        except ValueError:
            raise CsvRowError(no, f"probability is not numeric: {prob_text!r}") from None
        if not np.isfinite(prob) or not 0.0 <= prob <= 1.0:
            raise CsvRowError(no, f"probability {prob_text} outside [0, 1]")
        if first_phase is None:
            first_phase = ts % GRID_STEP_S
        elif ts % GRID_STEP_S != first_phase:
            raise GridAlignmentError(
                f"line {no}: timestamp {ts_text} is off the stream's {GRID_STEP_S} s grid"
            )
        if timestamps:
            if ts == timestamps[-1]:
                raise CsvRowError(no, f"duplicate timestamp {ts_text}")
            if ts < timestamps[-1]:
                raise CsvRowError(
                    no, f"timestamp {ts_text} not after {format_utc(from_unix(timestamps[-1]))}"
                )
        timestamps.append(ts)
        probs.append(prob)
    return PredictionStream(
        modality=modality,
        timestamps=np.array(timestamps, dtype=np.int64),
        probabilities=np.array(probs, dtype=np.float64),
    )


def write_prediction_stream(
    stream: PredictionStream,
    path: str | Path,
    header_comment: str | None = None,
) -> None:
    """Write a stream so that read_prediction_stream reproduces it exactly.

    Probabilities are printed with 6 decimals when that representation is
    exact, otherwise with full round-trip precision.
    """
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(STREAM_HEADER)
    for ts, prob in zip(stream.timestamps, stream.probabilities):
        lines.append(f"{format_utc(from_unix(int(ts)))},{format_probability(float(prob))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
