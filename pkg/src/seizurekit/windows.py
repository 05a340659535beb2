"""Sliding-window extraction, labeling, and training-set undersampling.

Windows are half-open intervals [t, t + window_s) advanced by stride_s; a
window is positive when it intersects any annotation interval. Extraction
is a strided view into the recording's sample array, so a full day of
500 Hz data costs no window-matrix copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    NoPositiveClassError,
    RateCompatibilityError,
    RecordingTooShortError,
)
from .types import SeizureAnnotation, SignalRecording, to_unix

CACHE_MAGIC = b"SKWS"
CACHE_VERSION = 1


@dataclass
class LabeledWindowSet:
    """Fixed-length windows with start timestamps and binary labels.

    windows: (n_windows, window_len_samples) array, possibly a read-only view
    start_times: int64 unix seconds, strictly increasing; fresh output of
        make_windows steps by exactly stride_s, undersampled sets have gaps
    labels: uint8, 1 = window intersects a seizure annotation
    """

    windows: np.ndarray
    start_times: np.ndarray
    labels: np.ndarray
    window_s: int
    stride_s: int
    sample_rate_hz: Fraction

    def __post_init__(self):
        n = self.windows.shape[0]
        if self.start_times.shape != (n,) or self.labels.shape != (n,):
            raise DataError("windows, start_times, and labels must agree in length")
        if n > 1 and np.any(np.diff(self.start_times) <= 0):
            raise DataError("start_times must be strictly increasing")

    @property
    def n_windows(self) -> int:
        return int(self.windows.shape[0])

    @property
    def window_len_samples(self) -> int:
        return int(self.windows.shape[1])


def label_windows(
    start_times: np.ndarray,
    window_s: int,
    annotations: list[SeizureAnnotation],
) -> np.ndarray:
    """Binary labels for windows [t, t + window_s) against annotation intervals."""
    starts = np.asarray(start_times, dtype=np.int64)
    labels = np.zeros(starts.shape, dtype=np.uint8)
    for ann in annotations:
        hit = (starts < ann.end_unix) & (ann.start_unix < starts + window_s)
        labels[hit] = 1
    return labels


def make_windows(
    recording: SignalRecording,
    annotations: list[SeizureAnnotation],
    window_s: int = 60,
    stride_s: int = 10,
) -> LabeledWindowSet:
    """Slice a recording into labeled sliding windows.

    n_windows = floor((duration - window_s) / stride_s) + 1; trailing samples
    that do not fill a final window are dropped. The window matrix is a
    read-only view into the recording's samples.
    """
    rate = recording.sample_rate_hz
    win_samples = window_s * rate
    stride_samples = stride_s * rate
    if win_samples.denominator != 1 or stride_samples.denominator != 1:
        raise RateCompatibilityError(
            f"window {window_s} s / stride {stride_s} s do not give whole samples "
            f"at {rate} Hz"
        )
    win_samples = int(win_samples)
    stride_samples = int(stride_samples)
    if recording.duration_seconds < window_s:
        raise RecordingTooShortError(
            f"recording lasts {float(recording.duration_seconds):g} s, "
            f"shorter than one {window_s} s window"
        )

    samples = np.asarray(recording.samples)
    view = np.lib.stride_tricks.sliding_window_view(samples, win_samples)
    windows = view[::stride_samples]
    n = windows.shape[0]

    start0 = to_unix(recording.start_time)
    start_times = start0 + stride_s * np.arange(n, dtype=np.int64)
    labels = label_windows(start_times, window_s, annotations)

    return LabeledWindowSet(
        windows=windows,
        start_times=start_times,
        labels=labels,
        window_s=window_s,
        stride_s=stride_s,
        sample_rate_hz=rate,
    )


def undersample(
    window_set: LabeledWindowSet,
    target_neg_per_pos: float = 1.0,
    seed: int = 0,
) -> LabeledWindowSet:
    """Rebalance a training set by discarding negatives.

    Keeps every positive; draws negatives uniformly without replacement until
    round(target_neg_per_pos * n_pos) are selected, or negatives run out.
    Output is re-sorted by start time and deterministic for a given seed.
    """
    labels = window_set.labels
    pos_idx = np.flatnonzero(labels == 1)
    neg_idx = np.flatnonzero(labels == 0)
    if pos_idx.size == 0:
        raise NoPositiveClassError("undersampling needs at least one positive window")

    k = min(int(round(target_neg_per_pos * pos_idx.size)), int(neg_idx.size))
    rng = np.random.default_rng(seed)
    chosen_neg = rng.choice(neg_idx, size=k, replace=False) if k else neg_idx[:0]
    keep = np.sort(np.concatenate([pos_idx, chosen_neg]))

    return LabeledWindowSet(
        windows=np.ascontiguousarray(window_set.windows[keep]),
        start_times=window_set.start_times[keep],
        labels=labels[keep],
        window_s=window_set.window_s,
        stride_s=window_set.stride_s,
        sample_rate_hz=window_set.sample_rate_hz,
    )


def save_window_cache(window_set: LabeledWindowSet, path: str | Path) -> None:
    """Columnar cache: magic, version, dims, row-major float32 windows,
    int64 start times, uint8 labels."""
    rate = Fraction(window_set.sample_rate_hz)
    head = np.array(
        [
            CACHE_VERSION,
            window_set.n_windows,
            window_set.window_len_samples,
            window_set.window_s,
            window_set.stride_s,
            rate.numerator,
            rate.denominator,
        ],
        dtype="<i8",
    )
    payload = (
        CACHE_MAGIC
        + head.tobytes()
        + np.asarray(window_set.windows, dtype="<f4").tobytes()
        + np.asarray(window_set.start_times, dtype="<i8").tobytes()
        + np.asarray(window_set.labels, dtype=np.uint8).tobytes()
    )
    Path(path).write_bytes(payload)


def load_window_cache(path: str | Path) -> LabeledWindowSet:
    raw = Path(path).read_bytes()
    if raw[:4] != CACHE_MAGIC:
        raise DataError(f"not a window cache file: bad magic {raw[:4]!r}")
    head = np.frombuffer(raw, dtype="<i8", count=7, offset=4)
    version, n, width, window_s, stride_s, num, den = (int(x) for x in head)
    if version != CACHE_VERSION:
        raise DataError(f"window cache version {version} unsupported (expected {CACHE_VERSION})")
    expected = 4 + 7 * 8 + n * width * 4 + n * 8 + n
    if len(raw) != expected:
        raise DataError(f"window cache is {len(raw)} bytes, expected {expected}")
    offset = 4 + 7 * 8
    windows = np.frombuffer(raw, dtype="<f4", count=n * width, offset=offset)
    offset += n * width * 4
    start_times = np.frombuffer(raw, dtype="<i8", count=n, offset=offset)
    offset += n * 8
    labels = np.frombuffer(raw, dtype=np.uint8, count=n, offset=offset)
    return LabeledWindowSet(
        windows=windows.reshape(n, width),
        start_times=start_times.copy(),
        labels=labels.copy(),
        window_s=window_s,
        stride_s=stride_s,
        sample_rate_hz=Fraction(num, den),
    )
