"""Window extraction, labeling oracle, undersampling, and the cache format."""

from datetime import datetime, timezone

import numpy as np
import pytest

from conftest import make_recording
from seizurekit import SeizureAnnotation, make_windows, undersample
from seizurekit.errors import (
    NoPositiveClassError,
    RateCompatibilityError,
    RecordingTooShortError,
)
from seizurekit.windows import load_window_cache, save_window_cache


def ann(start_s, duration_s, base="2024-01-01T00:00:00"):
    t0 = datetime.fromisoformat(base).replace(tzinfo=timezone.utc)
    return SeizureAnnotation(
        "ratA",
        datetime.fromtimestamp(int(t0.timestamp()) + start_s, tz=timezone.utc),
        duration_s,
    )


def test_window_count_one_week():
    # a week of data at stride 10 gives 60,475 windows ("over 60,000 time frames")
    rec = make_recording(np.zeros(7 * 86400), rate=1)
    ws = make_windows(rec, [])
    assert ws.n_windows == 7 * 86400 // 10 - 5 == 60475


def test_samples_per_row_at_500hz():
    rec = make_recording(np.zeros(500 * 120), rate=500)
    ws = make_windows(rec, [])
    assert ws.window_len_samples == 30000


def test_trailing_samples_dropped():
    rec = make_recording(np.zeros(120 * 75 + 7), rate=120)
    ws = make_windows(rec, [])
    assert ws.n_windows == (75 - 60) // 10 + 1


def test_label_rule_half_open():
    rec = make_recording(np.zeros(240 * 1), rate=1)
    ws = make_windows(rec, [ann(130, 40)])  # seizure [130, 170)
    labeled = {int(t - ws.start_times[0]): int(l) for t, l in zip(ws.start_times, ws.labels)}
    for start in (80, 90, 100, 110, 120, 130, 140, 150, 160):
        assert labeled[start] == 1, start
    assert labeled[70] == 0  # [70, 130) misses [130, 170)
    assert labeled[170] == 0


def test_window_is_pure_view():
    samples = np.arange(120 * 100, dtype=np.float64)
    rec = make_recording(samples, rate=120)
    ws = make_windows(rec, [])
    rate = 120
    rng = np.random.default_rng(1)
    for _ in range(1000):
        i = int(rng.integers(0, ws.n_windows))
        j = int(rng.integers(0, ws.window_len_samples))
        offset = (int(ws.start_times[i]) - int(ws.start_times[0])) * rate + j
        assert ws.windows[i, j] == samples[offset]
    assert ws.windows.base is not None  # a view, not a copy


def test_label_oracle_random_pairs(rng):
    # brute-force interval intersection vs make_windows labels
    rec = make_recording(np.zeros(3600), rate=1)
    for _ in range(40):
        n_ann = int(rng.integers(1, 4))
        starts = np.sort(rng.choice(3000, size=n_ann, replace=False) + 100)
        anns = []
        last_end = -1
        for s in starts:
            if s <= last_end:
                continue
            d = int(rng.integers(10, 80))
            anns.append(ann(int(s), d))
            last_end = s + d
        ws = make_windows(rec, anns)
        for i in rng.integers(0, ws.n_windows, size=25):
            t = int(ws.start_times[int(i)]) - int(ws.start_times[0])
            expect = any(
                t < (a.start_unix - ws.start_times[0] + a.duration_s)
                and (a.start_unix - ws.start_times[0]) < t + 60
                for a in anns
            )
            assert bool(ws.labels[int(i)]) == expect


def test_too_short_recording():
    rec = make_recording(np.zeros(30), rate=1)
    with pytest.raises(RecordingTooShortError):
        make_windows(rec, [])


def test_rate_incompatibility():
    from fractions import Fraction

    rec = make_recording(np.zeros(1000), rate=1)
    object.__setattr__(rec, "sample_rate_hz", Fraction(7, 3))
    with pytest.raises(RateCompatibilityError):
        make_windows(rec, [], window_s=60, stride_s=10)


class TestUndersample:
    def _set(self, n=400, seizure=(1300, 45)):
        rec = make_recording(np.arange(4060, dtype=np.float64), rate=1)
        return make_windows(rec, [ann(*seizure)])

    def test_balanced_output(self):
        ws = self._set()
        n_pos = int(ws.labels.sum())
        out = undersample(ws, 1.0, seed=3)
        assert int(out.labels.sum()) == n_pos
        assert out.n_windows == 2 * n_pos  # 50/50 balance

    def test_all_positives_kept_and_ratio(self, rng):
        ws = self._set()
        n_pos = int(ws.labels.sum())
        for target in (0.5, 1.0, 2.5, 7.0):
            out = undersample(ws, target, seed=11)
            assert int(out.labels.sum()) == n_pos
            want = min(round(target * n_pos), int((ws.labels == 0).sum()))
            assert int((out.labels == 0).sum()) == want

    def test_exhaustion_keeps_all_negatives(self):
        ws = self._set()
        out = undersample(ws, 1e9, seed=0)
        assert out.n_windows == ws.n_windows

    def test_deterministic_and_sorted(self):
        ws = self._set()
        a = undersample(ws, 1.0, seed=42)
        b = undersample(ws, 1.0, seed=42)
        assert np.array_equal(a.start_times, b.start_times)
        assert np.all(np.diff(a.start_times) > 0)
        c = undersample(ws, 1.0, seed=43)
        assert not np.array_equal(a.start_times, c.start_times)

    def test_rows_follow_start_times(self):
        ws = self._set()
        out = undersample(ws, 1.0, seed=1)
        t0 = int(ws.start_times[0])
        for i in range(out.n_windows):
            offset = int(out.start_times[i]) - t0
            assert out.windows[i, 0] == ws.windows[offset // 10, 0]

    def test_no_positives_error(self):
        rec = make_recording(np.zeros(600), rate=1)
        ws = make_windows(rec, [])
        with pytest.raises(NoPositiveClassError):
            undersample(ws, 1.0, seed=0)


def test_cache_roundtrip(tmp_path):
    rec = make_recording(np.arange(1200, dtype=np.float64) / 7.0, rate=1)
    ws = make_windows(rec, [ann(500, 30)])
    path = tmp_path / "w.bin"
    save_window_cache(ws, path)
    back = load_window_cache(path)
    assert back.n_windows == ws.n_windows
    assert np.array_equal(back.start_times, ws.start_times)
    assert np.array_equal(back.labels, ws.labels)
    assert np.allclose(back.windows, ws.windows, atol=1e-4)  # float32 storage
    assert back.sample_rate_hz == ws.sample_rate_hz
