"""Seeded generator of paper-shaped multi-modal datasets.

Background is colored noise (AR(1)) plus white measurement noise. Each
planted seizure adds a band-limited oscillatory burst (a dense comb of
sinusoids with seeded random phases, cosine-ramped at the edges) whose RMS
is burst_gain times the background amplitude. On top of that, each modality
gets its own short in-band artifact transients at seeded random times:
they imitate motion or electrical noise, so they resemble seizures within
one modality but never co-occur across modalities. The video stream is
produced at the label level: ground-truth window labels on the 10 s grid,
flipped independently with flip_probability and mapped to probabilities
0.1 / 0.9, covering a seeded selection of 30-minute blocks of the grid.

Amplitudes are per-animal knobs: electrode placement and hardware gain vary
between subjects, so held-out animals are generated with their own
background_amplitude (burst gain stays relative to it).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.signal import lfilter

from .errors import DataError, PackingError
from .types import PredictionStream, SeizureAnnotation, SignalRecording, to_unix
from .windows import label_windows

MIN_SEPARATION_S = 120
_VIDEO_BLOCK_GRID_POINTS = 180  # 30 min of 10 s steps

_AR_POLE = {"ecog": 0.9, "piezo": 0.8}


@dataclass(frozen=True)
class SynthConfig:
    duration_s: int = 86400
    n_seizures: int = 4
    seizure_duration_range_s: tuple[int, int] = (30, 60)
    ecog_rate_hz: int = 500
    piezo_rate_hz: int = 120
    background_amplitude: float = 1.0
    ecog_burst_band_hz: tuple[float, float] = (18.0, 24.0)
    piezo_burst_band_hz: tuple[float, float] = (4.0, 8.0)
    ecog_burst_gain: float = 1.0
    piezo_burst_gain: float = 0.7
    ecog_noise: float = 0.3
    piezo_noise: float = 0.3
    artifact_rate_per_hour: float = 4.0
    artifact_duration_range_s: tuple[int, int] = (3, 10)
    video_coverage_fraction: float = 0.35
    video_flip_probability: float = 0.05
    window_s: int = 60
    stride_s: int = 10
    animal_id: str = "rat0"
    start_time: datetime = datetime(2024, 1, 1, tzinfo=timezone.utc)
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.seizure_duration_range_s
        if not 1 <= lo <= hi:
            raise DataError(f"bad seizure duration range {self.seizure_duration_range_s}")
        if self.n_seizures < 1:
            raise DataError("n_seizures must be >= 1")
        if not 0.0 <= self.video_coverage_fraction <= 1.0:
            raise DataError("video_coverage_fraction must be in [0, 1]")
        if not 0.0 <= self.video_flip_probability <= 1.0:
            raise DataError("video_flip_probability must be in [0, 1]")
        to_unix(self.start_time)


class SynthDataset(NamedTuple):
    ecog: SignalRecording
    piezo: SignalRecording
    annotations: list[SeizureAnnotation]
    video_stream: PredictionStream


def _place_seizures(config: SynthConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    """(start_offset_s, duration_s) pairs, non-overlapping, separated by at
    least MIN_SEPARATION_S with the same lead margin before the first."""
    lo, hi = config.seizure_duration_range_s
    n = config.n_seizures
    durations = rng.integers(lo, hi + 1, size=n)
    needed = int(durations.sum()) + MIN_SEPARATION_S * n
    free = config.duration_s - needed
    if free < 0:
        raise PackingError(
            f"{n} seizure(s) of up to {hi} s with {MIN_SEPARATION_S} s separation "
            f"do not fit in {config.duration_s} s"
        )
    jitter = np.sort(rng.integers(0, free + 1, size=n))
    placed = []
    cursor = MIN_SEPARATION_S
    for i in range(n):
        start = cursor + int(jitter[i])
        placed.append((start, int(durations[i])))
        cursor += int(durations[i]) + MIN_SEPARATION_S
    return placed


def _artifact_times(
    config: SynthConfig,
    placed: list[tuple[int, int]],
    rng: np.random.Generator,
) -> list[tuple[int, int]]:
    """Seeded artifact transients: (start_s, duration_s), kept clear of
    seizures so they never extend a true event's windows."""
    count = rng.poisson(config.artifact_rate_per_hour * config.duration_s / 3600.0)
    lo, hi = config.artifact_duration_range_s
    out: list[tuple[int, int]] = []
    guard = config.window_s + MIN_SEPARATION_S // 2
    for _ in range(int(count)):
        duration = int(rng.integers(lo, hi + 1))
        for _ in range(50):  # rejection sampling against the seizure layout
            start = int(rng.integers(0, max(1, config.duration_s - duration)))
            clear = all(
                start + duration + guard <= s or s + d + guard <= start
                for s, d in placed
            )
            if clear:
                out.append((start, duration))
                break
    return out


def _background(
    n: int, rate: int, amplitude: float, white_level: float, pole: float, rng: np.random.Generator
) -> np.ndarray:
    white = rng.standard_normal(n)
    colored = lfilter([np.sqrt(1.0 - pole * pole)], [1.0, -pole], white)
    out = amplitude * colored
    if white_level > 0:
        out += white_level * rng.standard_normal(n)
    return out


def _add_burst(
    samples: np.ndarray,
    rate: int,
    start_s: int,
    duration_s: int,
    band_hz: tuple[float, float],
    rms: float,
    rng: np.random.Generator,
) -> None:
    lo, hi = band_hz
    if not 0 < lo < hi < rate / 2:
        raise DataError(f"burst band {band_hz} invalid for rate {rate} Hz")
    n_components = max(2, int(round((hi - lo) * 2)) + 1)  # 0.5 Hz comb
    freqs = np.linspace(lo, hi, n_components)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_components)

    length = duration_s * rate
    t = np.arange(length) / rate
    burst = np.zeros(length)
    for f, phase in zip(freqs, phases):
        burst += np.sin(2.0 * np.pi * f * t + phase)
    burst *= rms * np.sqrt(2.0 / n_components)

    ramp = min(2 * rate, length // 4)
    if ramp > 0:
        envelope = 0.5 * (1.0 - np.cos(np.pi * np.arange(ramp) / ramp))
        burst[:ramp] *= envelope
        burst[-ramp:] *= envelope[::-1]

    begin = start_s * rate
    samples[begin : begin + length] += burst


def generate(config: SynthConfig) -> SynthDataset:
    """Deterministic dataset for one animal: ECoG and Piezo recordings with
    planted bursts, the matching annotations, and a pre-aggregated video
    prediction stream on the 10 s grid."""
    placement_rng = np.random.default_rng([config.seed, 0])
    placed = _place_seizures(config, placement_rng)

    annotations = [
        SeizureAnnotation(
            animal_id=config.animal_id,
            start_time=datetime.fromtimestamp(
                to_unix(config.start_time) + start, tz=timezone.utc
            ),
            duration_s=duration,
        )
        for start, duration in placed
    ]

    recordings = {}
    for idx, (modality, rate, band, gain, noise) in enumerate(
        [
            ("ecog", config.ecog_rate_hz, config.ecog_burst_band_hz, config.ecog_burst_gain, config.ecog_noise),
            ("piezo", config.piezo_rate_hz, config.piezo_burst_band_hz, config.piezo_burst_gain, config.piezo_noise),
        ]
    ):
        bg_rng = np.random.default_rng([config.seed, 1 + idx])
        burst_rng = np.random.default_rng([config.seed, 3 + idx])
        artifact_rng = np.random.default_rng([config.seed, 7 + idx])
        samples = _background(
            config.duration_s * rate,
            rate,
            config.background_amplitude,
            noise * config.background_amplitude,
            _AR_POLE[modality],
            bg_rng,
        )
        for start, duration in placed:
            _add_burst(
                samples,
                rate,
                start,
                duration,
                band,
                gain * config.background_amplitude,
                burst_rng,
            )
        for start, duration in _artifact_times(config, placed, artifact_rng):
            _add_burst(
                samples,
                rate,
                start,
                duration,
                band,
                gain * config.background_amplitude,
                artifact_rng,
            )
        recordings[modality] = SignalRecording(
            samples=samples,
            sample_rate_hz=Fraction(rate),
            start_time=config.start_time,
            channel_label=modality.upper(),
            physical_dimension="uV" if modality == "ecog" else "au",
        )

    video_stream = _video_stream(config, annotations)
    return SynthDataset(
        ecog=recordings["ecog"],
        piezo=recordings["piezo"],
        annotations=annotations,
        video_stream=video_stream,
    )


def _video_stream(config: SynthConfig, annotations: list[SeizureAnnotation]) -> PredictionStream:
    n_grid = (config.duration_s - config.window_s) // config.stride_s + 1
    if n_grid < 1:
        raise DataError("duration too short for one window on the 10 s grid")
    start0 = to_unix(config.start_time)
    grid = start0 + config.stride_s * np.arange(n_grid, dtype=np.int64)
    labels = label_windows(grid, config.window_s, annotations)

    coverage_rng = np.random.default_rng([config.seed, 5])
    flip_rng = np.random.default_rng([config.seed, 6])

    n_blocks = int(np.ceil(n_grid / _VIDEO_BLOCK_GRID_POINTS))
    n_selected = int(round(config.video_coverage_fraction * n_blocks))
    if n_selected == 0:
        covered = np.zeros(0, dtype=np.int64)
    else:
        blocks = np.sort(coverage_rng.choice(n_blocks, size=n_selected, replace=False))
        pieces = [
            np.arange(
                b * _VIDEO_BLOCK_GRID_POINTS,
                min((b + 1) * _VIDEO_BLOCK_GRID_POINTS, n_grid),
            )
            for b in blocks
        ]
        covered = np.concatenate(pieces)

    flips = flip_rng.random(covered.size) < config.video_flip_probability
    observed = labels[covered].astype(bool) ^ flips
    probs = np.where(observed, 0.9, 0.1)
    return PredictionStream(
        modality="video",
        timestamps=grid[covered],
        probabilities=probs.astype(np.float64),
    )


def shifted_animal(config: SynthConfig, seed: int, background_amplitude: float | None = None) -> SynthConfig:
    """Same protocol, different animal: new seed, optionally its own gain."""
    if background_amplitude is None:
        background_amplitude = config.background_amplitude
    return replace(config, seed=seed, background_amplitude=background_amplitude)
