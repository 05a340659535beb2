"""Walk through the on-disk formats: single-signal EDF, the annotation CSV,
and the prediction-stream CSV, with write/read round-trips for each.

Run:  python demos/01_file_formats.py
"""

from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from seizurekit import (
    SeizureAnnotation,
    SignalRecording,
    read_annotations,
    read_edf,
    read_prediction_stream,
    write_annotations,
    write_edf,
    write_prediction_stream,
)
from seizurekit.types import PredictionStream

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# --- EDF ------------------------------------------------------------------
rng = np.random.default_rng(7)
rate = 120
t = np.arange(rate * 30) / rate
signal = 40.0 * np.sin(2 * np.pi * 6.0 * t) + 5.0 * rng.standard_normal(t.size)
recording = SignalRecording(
    samples=signal,
    sample_rate_hz=Fraction(rate),
    start_time=datetime(2024, 6, 1, 12, 0, 0, tzinfo=timezone.utc),
    channel_label="Piezo",
    physical_dimension="au",
)

edf_path = OUT / "demo.edf"
write_edf(recording, (-80.0, 80.0), edf_path)
back = read_edf(edf_path)
step = 160.0 / 65535.0
print(f"EDF: wrote {edf_path.stat().st_size} bytes "
      f"(512-byte header + {len(signal)} 16-bit samples)")
print(f"EDF: round-trip max error {np.max(np.abs(back.samples - signal)):.3e} "
      f"(one quantization step is {step:.3e})")
print(f"EDF: rate {back.sample_rate_hz} Hz, start {back.start_time}, "
      f"label {back.channel_label!r}\n")

# --- annotations ----------------------------------------------------------
annotations = [
    SeizureAnnotation("ratA", datetime(2024, 6, 1, 12, 2, 10, tzinfo=timezone.utc), 45),
    SeizureAnnotation("ratA", datetime(2024, 6, 1, 12, 9, 30, tzinfo=timezone.utc), 31),
]
ann_path = OUT / "annotations.csv"
write_annotations(annotations, ann_path)
print(f"annotations.csv:\n{ann_path.read_text()}")
assert read_annotations(ann_path) == annotations

# --- prediction stream ----------------------------------------------------
t0 = int(datetime(2024, 6, 1, 12, 0, 0, tzinfo=timezone.utc).timestamp())
stream = PredictionStream(
    modality="video",
    timestamps=np.array([t0, t0 + 10, t0 + 30], dtype=np.int64),  # gap at +20
    probabilities=np.array([0.1, 0.9, 0.9]),
)
stream_path = OUT / "predictions_video.csv"
write_prediction_stream(stream, stream_path)
print(f"predictions_video.csv (gaps are legal):\n{stream_path.read_text()}")
assert read_prediction_stream(stream_path, "video") == stream
print("all three formats round-trip exactly")
