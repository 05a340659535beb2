import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from seizurekit import SignalRecording


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def make_recording(
    samples,
    rate=120,
    start="2024-01-01T00:00:00",
    label="ECoG",
    dimension="uV",
):
    return SignalRecording(
        samples=np.asarray(samples, dtype=np.float64),
        sample_rate_hz=Fraction(rate),
        start_time=datetime.fromisoformat(start).replace(tzinfo=timezone.utc),
        channel_label=label,
        physical_dimension=dimension,
    )


@pytest.fixture
def small_recording():
    t = np.arange(120 * 120) / 120.0
    return make_recording(np.sin(2 * np.pi * 3.0 * t), rate=120)
