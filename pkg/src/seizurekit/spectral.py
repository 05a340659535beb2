"""One-sided FFT magnitude features for labeled windows.

No taper and no detrending: the transform is the plain magnitude of the
discrete Fourier transform, DC bin included, mixed-radix so the 30,000 and
7,200 sample windows of 500 Hz / 120 Hz data transform exactly (never
zero-padded).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DataError, NonFiniteInputError
from .windows import LabeledWindowSet

_CHUNK_ROWS = 256


@dataclass
class FeatureWindowSet:
    """Per-window feature rows with the timestamps and labels of their source.

    For spectral features, bin k of a row is |X_k| for k = 0..floor(N/2),
    with frequency resolution bin_hz = sample_rate / N.
    """

    features: np.ndarray
    start_times: np.ndarray
    labels: np.ndarray
    window_s: int
    stride_s: int
    bin_hz: float
    log_magnitude: bool = False

    def __post_init__(self):
        n = self.features.shape[0]
        if self.start_times.shape != (n,) or self.labels.shape != (n,):
            raise DataError("features, start_times, and labels must agree in length")

    @property
    def n_windows(self) -> int:
        return int(self.features.shape[0])

    @property
    def series_len(self) -> int:
        return int(self.features.shape[1])


def fft_magnitude(window: np.ndarray) -> np.ndarray:
    """|X_k| for k = 0..floor(N/2) of a real window of N >= 2 samples."""
    x = np.asarray(window, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise DataError(f"window must be 1-d with at least 2 samples, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise NonFiniteInputError(f"non-finite sample at index {bad}")
    return np.abs(np.fft.rfft(x))


def transform_set(window_set: LabeledWindowSet, log_magnitude: bool = False) -> FeatureWindowSet:
    """Apply fft_magnitude to every row; timestamps and labels pass through.

    log_magnitude applies log1p to the magnitudes (off by default; the
    pipeline trains on plain magnitudes).
    """
    n, width = window_set.windows.shape
    n_bins = width // 2 + 1
    out = np.empty((n, n_bins), dtype=np.float64)
    for lo in range(0, n, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, n)
        chunk = np.asarray(window_set.windows[lo:hi], dtype=np.float64)
        if not np.all(np.isfinite(chunk)):
            rows, _ = np.nonzero(~np.isfinite(chunk))
            raise NonFiniteInputError(f"non-finite sample in window row {lo + int(rows[0])}")
        out[lo:hi] = np.abs(np.fft.rfft(chunk, axis=1))
    if log_magnitude:
        np.log1p(out, out=out)
    rate = Fraction(window_set.sample_rate_hz)
    return FeatureWindowSet(
        features=out,
        start_times=window_set.start_times,
        labels=window_set.labels,
        window_s=window_set.window_s,
        stride_s=window_set.stride_s,
        bin_hz=float(rate) / width if width else 0.0,
        log_magnitude=log_magnitude,
    )


def raw_feature_set(window_set: LabeledWindowSet) -> FeatureWindowSet:
    """Untransformed windows as feature rows (the no-FFT ablation path)."""
    return FeatureWindowSet(
        features=np.asarray(window_set.windows, dtype=np.float64),
        start_times=window_set.start_times,
        labels=window_set.labels,
        window_s=window_set.window_s,
        stride_s=window_set.stride_s,
        bin_hz=0.0,
    )
