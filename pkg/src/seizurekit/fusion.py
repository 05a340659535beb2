"""Timestamp alignment and weighted late fusion of prediction streams.

Frames are the union of all stream timestamps; a modality missing at a
frame simply drops out, and the remaining weights are renormalized over
whatever is present (the fallback used when video covers only part of the
recording). The fused value is therefore always a convex combination of
the present probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, StreamAlignmentError, ZeroWeightError
from .types import GRID_STEP_S, MODALITIES, PredictionStream


@dataclass(frozen=True)
class FusionWeights:
    """Non-negative per-modality weights; only ratios matter."""

    w_ecog: float = 0.5
    w_piezo: float = 0.2
    w_video: float = 0.3

    def __post_init__(self):
        if min(self.w_ecog, self.w_piezo, self.w_video) < 0:
            raise DataError(f"weights must be non-negative: {self}")
        if self.w_ecog + self.w_piezo + self.w_video <= 0:
            raise DataError("at least one weight must be positive")

    def normalized(self) -> dict[str, float]:
        total = self.w_ecog + self.w_piezo + self.w_video
        return {
            "ecog": self.w_ecog / total,
            "piezo": self.w_piezo / total,
            "video": self.w_video / total,
        }

    def weight_for(self, modality: str) -> float:
        try:
            return {"ecog": self.w_ecog, "piezo": self.w_piezo, "video": self.w_video}[modality]
        except KeyError:
            raise DataError(f"no fusion weight for modality {modality!r}") from None


@dataclass(frozen=True)
class AlignedFrame:
    """One grid timestamp with the probabilities of whichever modalities have one."""

    timestamp: int  # unix seconds
    probabilities: dict[str, float]  # modality -> probability

    def __post_init__(self):
        if not self.probabilities:
            raise DataError("aligned frame must contain at least one modality")


def align(streams: list[PredictionStream]) -> list[AlignedFrame]:
    """One frame per timestamp in the union of stream timestamps, ascending.

    All streams must share the 10 s grid phase; the same modality may not
    appear twice.
    """
    if not streams:
        return []
    non_empty = [s for s in streams if len(s)]
    seen = set()
    for s in streams:
        if s.modality in seen:
            raise DataError(f"modality {s.modality!r} supplied more than once")
        seen.add(s.modality)
    if not non_empty:
        return []
    phase = non_empty[0].grid_phase
    for s in non_empty[1:]:
        if s.grid_phase != phase:
            raise StreamAlignmentError(
                f"streams are on different {GRID_STEP_S} s grids: "
                f"{s.modality!r} has phase {s.grid_phase}, expected {phase}"
            )

    union = np.unique(np.concatenate([s.timestamps for s in non_empty]))
    lookup: dict[str, dict[int, float]] = {
        s.modality: dict(zip(s.timestamps.tolist(), s.probabilities.tolist()))
        for s in non_empty
    }
    frames = []
    for ts in union.tolist():
        present = {
            modality: table[ts] for modality, table in lookup.items() if ts in table
        }
        frames.append(AlignedFrame(timestamp=ts, probabilities=present))
    return frames


def fuse(frames: list[AlignedFrame], weights: FusionWeights) -> PredictionStream:
    """Weighted average per frame, weights renormalized over present modalities."""
    timestamps = np.empty(len(frames), dtype=np.int64)
    fused = np.empty(len(frames), dtype=np.float64)
    for i, frame in enumerate(frames):
        total = 0.0
        acc = 0.0
        # fixed summation order keeps fused values independent of input order
        for modality in MODALITIES:
            if modality not in frame.probabilities:
                continue
            w = weights.weight_for(modality)
            total += w
            acc += w * frame.probabilities[modality]
        for modality in frame.probabilities:
            if modality not in MODALITIES:
                raise DataError(f"cannot fuse stream tagged {modality!r}")
        if total <= 0.0:
            raise ZeroWeightError(
                f"frame at unix {frame.timestamp} has only zero-weight modalities "
                f"({sorted(frame.probabilities)})"
            )
        timestamps[i] = frame.timestamp
        # clip guards float rounding at the [0, 1] edges of a convex combination
        fused[i] = min(1.0, max(0.0, acc / total))
    return PredictionStream(modality="fused", timestamps=timestamps, probabilities=fused)


def fuse_streams(streams: list[PredictionStream], weights: FusionWeights) -> PredictionStream:
    """align + fuse in one call."""
    return fuse(align(streams), weights)
