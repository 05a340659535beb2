"""Shared domain types: recordings, annotations, prediction streams.

Timestamps are timezone-aware UTC datetimes at 1 s resolution throughout.
Prediction streams live on a 10 s grid; the grid phase of a stream is the
offset of its timestamps from the midnight-anchored 10 s lattice (UTC days
are a whole number of 10 s steps, so unix time modulo 10 identifies the
phase). Streams can only be aligned when their phases agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from .errors import (
    DuplicateTimestampError,
    GridAlignmentError,
    OrderingError,
    DataError,
)

GRID_STEP_S = 10

MODALITIES = ("ecog", "piezo", "video")
STREAM_TAGS = MODALITIES + ("fused",)


def to_unix(ts: datetime) -> int:
    """Whole unix seconds of a UTC datetime (sub-second parts rejected)."""
    if ts.tzinfo is None:
        raise DataError(f"naive datetime not allowed: {ts!r}")
    if ts.microsecond != 0:
        raise DataError(f"timestamps have 1 s resolution, got {ts!r}")
    return int(ts.timestamp())


def from_unix(seconds: int) -> datetime:
    return datetime.fromtimestamp(int(seconds), tz=timezone.utc)


def parse_utc(text: str) -> datetime:
    """Parse an ISO 8601 UTC timestamp of the form YYYY-MM-DDTHH:MM:SSZ."""
    try:
        ts = datetime.strptime(text, "%Y-%m-%dT%H:%M:%SZ")
    except ValueError as exc:
        raise DataError(f"bad UTC timestamp {text!r}: {exc}") from None
    return ts.replace(tzinfo=timezone.utc)


def format_utc(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def format_probability(p: float) -> str:
    """Fixed 6 decimals when that is exact, else full round-trip precision."""
    fixed = f"{p:.6f}"
    if float(fixed) == p:
        return fixed
    return repr(float(p))


@dataclass(frozen=True)
class SignalRecording:
    """Uniformly sampled single-channel signal in physical units."""

    samples: np.ndarray
    sample_rate_hz: Fraction
    start_time: datetime
    channel_label: str = ""
    physical_dimension: str = "uV"

    def __post_init__(self):
        object.__setattr__(self, "sample_rate_hz", Fraction(self.sample_rate_hz))
        if self.sample_rate_hz <= 0:
            raise DataError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        to_unix(self.start_time)  # validates tz-awareness and 1 s resolution

    @property
    def duration_seconds(self) -> Fraction:
        """Exact duration in seconds (rational arithmetic)."""
        return Fraction(len(self.samples)) / self.sample_rate_hz


@dataclass(frozen=True, order=True)
class SeizureAnnotation:
    """One annotated seizure: half-open interval [start_time, start_time + duration_s)."""

    animal_id: str
    start_time: datetime
    duration_s: int

    def __post_init__(self):
        to_unix(self.start_time)
        if self.duration_s < 1:
            raise DataError(f"duration_s must be >= 1, got {self.duration_s}")

    @property
    def start_unix(self) -> int:
        return to_unix(self.start_time)

    @property
    def end_unix(self) -> int:
        return self.start_unix + int(self.duration_s)


@dataclass
class PredictionStream:
    """Per-modality probabilities on the shared 10 s grid; gaps allowed.

    timestamps are int64 unix seconds, strictly increasing, all congruent
    modulo GRID_STEP_S. probabilities lie in [0, 1].
    """

    modality: str
    timestamps: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        if self.modality not in STREAM_TAGS:
            raise DataError(f"unknown modality {self.modality!r}, expected one of {STREAM_TAGS}")
        ts = np.asarray(self.timestamps, dtype=np.int64)
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if ts.shape != probs.shape or ts.ndim != 1:
            raise DataError("timestamps and probabilities must be equal-length 1-d arrays")
        if ts.size:
            deltas = np.diff(ts)
            if np.any(deltas == 0):
                i = int(np.flatnonzero(deltas == 0)[0])
                raise DuplicateTimestampError(
                    f"duplicate timestamp {format_utc(from_unix(ts[i]))} at entries {i} and {i + 1}"
                )
            if np.any(deltas < 0):
                i = int(np.flatnonzero(deltas < 0)[0])
                raise OrderingError(
                    f"timestamps not increasing at entry {i + 1} "
                    f"({format_utc(from_unix(ts[i + 1]))} after {format_utc(from_unix(ts[i]))})"
                )
            off = (ts - ts[0]) % GRID_STEP_S
            if np.any(off != 0):
                i = int(np.flatnonzero(off != 0)[0])
                raise GridAlignmentError(
                    f"timestamp {format_utc(from_unix(ts[i]))} (entry {i}) is off the "
                    f"{GRID_STEP_S} s grid of this stream"
                )
        if np.any((probs < 0.0) | (probs > 1.0) | ~np.isfinite(probs)):
            i = int(np.flatnonzero((probs < 0.0) | (probs > 1.0) | ~np.isfinite(probs))[0])
            raise DataError(f"probability {probs[i]!r} at entry {i} outside [0, 1]")
        self.timestamps = ts
        self.probabilities = probs

    def __len__(self) -> int:
        return int(self.timestamps.size)

    @property
    def grid_phase(self) -> int:
        """Offset of this stream from the midnight-anchored 10 s lattice."""
        if not len(self):
            raise DataError("empty stream has no grid phase")
        return int(self.timestamps[0] % GRID_STEP_S)

    @property
    def entries(self) -> list[tuple[datetime, float]]:
        return [(from_unix(t), float(p)) for t, p in zip(self.timestamps, self.probabilities)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PredictionStream)
            and self.modality == other.modality
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.probabilities, other.probabilities)
        )


@dataclass(frozen=True)
class SeizureEvent:
    """Detected (or reference) event: [start_time, start_time + duration_s)."""

    start_time: datetime
    duration_s: int
    confidence: float

    def __post_init__(self):
        to_unix(self.start_time)
        if self.duration_s < 1:
            raise DataError(f"duration_s must be >= 1, got {self.duration_s}")
        if not 0.0 <= self.confidence <= 1.0:
            raise DataError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def start_unix(self) -> int:
        return to_unix(self.start_time)

    @property
    def end_unix(self) -> int:
        return self.start_unix + int(self.duration_s)
