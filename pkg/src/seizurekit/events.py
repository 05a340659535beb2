"""Turn probability streams into discrete events: threshold, drop isolated
positives, group grid-consecutive runs, and sweep thresholds for the
highest cutoff that still catches every true event.

The pipeline order is binarize -> remove_isolated -> group_events. An
event's extent is the union of its member windows, [first_start,
last_start + window_s), which deliberately runs early and late relative
to the underlying seizure.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CsvRowError, DataError, EmptyStreamError
from .metrics import EventMetrics, event_metrics
from .types import (
    PredictionStream,
    SeizureAnnotation,
    SeizureEvent,
    format_probability,
    format_utc,
    from_unix,
    parse_utc,
)

EVENTS_HEADER = "start_time,duration_s,confidence"


@dataclass(frozen=True)
class SweepResult:
    threshold: float
    n_true_detected: int
    n_false_positive_events: int


def binarize(stream: PredictionStream, threshold: float) -> np.ndarray:
    """1 where probability >= threshold, aligned to the stream's entries."""
    if not 0.0 <= threshold <= 1.0:
        raise DataError(f"threshold {threshold} outside [0, 1]")
    return (stream.probabilities >= threshold).astype(np.uint8)


def remove_isolated(
    binary: np.ndarray,
    timestamps: np.ndarray,
    stride_s: int = 10,
) -> np.ndarray:
    """Zero out positives whose grid neighbors are both negative.

    Neighbors are the entries stride_s before/after; a missing grid position
    (sequence edge or timestamp gap) counts as a negative neighbor. Single
    pass: all decisions are made against the input sequence.
    """
    binary = np.asarray(binary, dtype=np.uint8)
    timestamps = np.asarray(timestamps, dtype=np.int64)
    if binary.shape != timestamps.shape:
        raise DataError("binary sequence and timestamps must align")
    if binary.size == 0:
        return binary.copy()

    left = np.zeros_like(binary)
    right = np.zeros_like(binary)
    contiguous = np.diff(timestamps) == stride_s
    left[1:] = binary[:-1] * contiguous
    right[:-1] = binary[1:] * contiguous
    isolated = (binary == 1) & (left == 0) & (right == 0)
    out = binary.copy()
    out[isolated] = 0
    return out


def group_events(
    binary: np.ndarray,
    stream: PredictionStream,
    window_s: int = 60,
    stride_s: int = 10,
) -> list[SeizureEvent]:
    """One event per maximal run of grid-consecutive positives.

    start = first positive timestamp; extent = union of member windows, so
    duration = last_start + window_s - first_start; confidence = mean
    probability over the run.
    """
    binary = np.asarray(binary, dtype=np.uint8)
    if binary.shape != stream.timestamps.shape:
        raise DataError("binary sequence must align to the stream")
    pos = np.flatnonzero(binary == 1)
    if pos.size == 0:
        return []

    ts = stream.timestamps[pos]
    probs = stream.probabilities[pos]
    # a run breaks where consecutive positives are not one grid step apart
    breaks = np.flatnonzero(np.diff(ts) != stride_s)
    run_starts = np.concatenate([[0], breaks + 1])
    run_ends = np.concatenate([breaks, [pos.size - 1]])

    events = []
    for lo, hi in zip(run_starts, run_ends):
        first = int(ts[lo])
        last = int(ts[hi])
        events.append(
            SeizureEvent(
                start_time=from_unix(first),
                duration_s=last + window_s - first,
                confidence=float(np.mean(probs[lo : hi + 1])),
            )
        )
    return events


def detect_events(
    stream: PredictionStream,
    threshold: float,
    window_s: int = 60,
    stride_s: int = 10,
) -> list[SeizureEvent]:
    """binarize -> remove_isolated -> group_events."""
    binary = binarize(stream, threshold)
    binary = remove_isolated(binary, stream.timestamps, stride_s)
    return group_events(binary, stream, window_s, stride_s)


def sweep(
    stream: PredictionStream,
    true_events: list[SeizureAnnotation],
    window_s: int = 60,
    stride_s: int = 10,
) -> tuple[list[SweepResult], SweepResult]:
    """Evaluate the event pipeline at every candidate threshold.

    Candidates are the distinct observed probabilities plus 0 and 1,
    descending. Selected is the highest threshold detecting every true
    event; if none does, the one maximizing detections, ties broken by
    fewest false positives, then highest threshold.
    """
    if len(stream) == 0:
        raise EmptyStreamError("cannot sweep an empty stream")
    if not true_events:
        raise DataError("sweep needs at least one true event")

    candidates = np.unique(np.concatenate([stream.probabilities, [0.0, 1.0]]))[::-1]
    results = []
    for threshold in candidates.tolist():
        events = detect_events(stream, threshold, window_s, stride_s)
        em: EventMetrics = event_metrics(events, true_events)
        results.append(
            SweepResult(
                threshold=float(threshold),
                n_true_detected=em.n_detected,
                n_false_positive_events=em.n_false_positive_events,
            )
        )

    n_true = len(true_events)
    full = [r for r in results if r.n_true_detected == n_true]
    if full:
        selected = max(full, key=lambda r: r.threshold)
    else:
        selected = min(
            results,
            key=lambda r: (-r.n_true_detected, r.n_false_positive_events, -r.threshold),
        )
    return results, selected


def write_events(
    events: list[SeizureEvent],
    path: str | Path,
    header_comment: str | None = None,
) -> None:
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(EVENTS_HEADER)
    for e in sorted(events, key=lambda x: x.start_unix):
        lines.append(
            f"{format_utc(e.start_time)},{e.duration_s},{format_probability(e.confidence)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_events(path: str | Path) -> list[SeizureEvent]:
    """Parse events.csv back into the event list (round-trip of write_events)."""
    from .csvio import _data_lines

    events = []
    for no, text in _data_lines(path, EVENTS_HEADER):
        parts = text.split(",")
        if len(parts) != 3:
            raise CsvRowError(no, f"expected 3 fields, got {len(parts)}")
        start_text, dur_text, conf_text = (p.strip() for p in parts)
        try:
            start = parse_utc(start_text)
            duration = int(dur_text)
            confidence = float(conf_text)
        except (DataError, ValueError) as exc:
            raise CsvRowError(no, str(exc)) from None
        events.append(SeizureEvent(start_time=start, duration_s=duration, confidence=confidence))
    return events


def report(
    events: list[SeizureEvent],
    sweep_result: SweepResult | None,
    out_dir: str | Path,
    header_comment: str | None = None,
) -> tuple[Path, Path]:
    """Write events.csv (machine-readable) and report.txt (human-readable)
    into out_dir; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "events.csv"
    txt_path = out / "report.txt"
    write_events(events, csv_path, header_comment=header_comment)

    lines = ["Detected seizure events", "=" * 24]
    if header_comment:
        lines.append(header_comment)
    lines.append(f"{'start (UTC)':<22}{'duration (s)':>14}{'confidence':>12}")
    for e in sorted(events, key=lambda x: x.start_unix):
        lines.append(f"{format_utc(e.start_time):<22}{e.duration_s:>14}{e.confidence:>12.4f}")
    lines.append(f"total events: {len(events)}")
    if sweep_result is not None:
        lines.append(
            f"sweep: threshold {format_probability(sweep_result.threshold)} detects "
            f"{sweep_result.n_true_detected} true event(s) with "
            f"{sweep_result.n_false_positive_events} false positive event(s)"
        )
    txt_path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return csv_path, txt_path
