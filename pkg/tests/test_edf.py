"""EDF subset reader/writer: scaling, round-trips, and rejection of corrupt headers."""

import numpy as np
import pytest

from conftest import make_recording
from seizurekit import read_edf, write_edf
from seizurekit.edf import DIGITAL_MAX, DIGITAL_MIN
from seizurekit.errors import (
    DataError,
    DegenerateScalingError,
    EdfFormatError,
    EdfTruncationError,
    RateCompatibilityError,
    UnsupportedLayoutError,
)


def _write_simple(tmp_path, samples, rate=120, physical_range=(-4.0, 4.0), name="a.edf"):
    rec = make_recording(samples, rate=rate)
    path = tmp_path / name
    write_edf(rec, physical_range, path)
    return rec, path


def test_header_is_512_bytes_for_one_signal(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(240))
    raw = path.read_bytes()
    assert int(raw[184:192].decode().strip()) == 256 * (1 + 1) == 512
    # data begins right after: 2 s at 120 Hz, 16-bit
    assert len(raw) == 512 + 240 * 2


def test_scaling_formula_digital_zero():
    # direct evaluation of the linear scaling for digital value 0 with
    # dig [-32768, 32767] and phys [-1000, 1000]
    expected = (0 - DIGITAL_MIN) * 2000.0 / (DIGITAL_MAX - DIGITAL_MIN) + (-1000.0)
    assert expected == pytest.approx(1000.0 / 65535.0)  # ~0.01526


def test_read_applies_scaling(tmp_path):
    # a constant signal at the range midpoint maps to digital round(-0.5) = 0,
    # which reads back as +half a quantization step
    rec, path = _write_simple(tmp_path, np.zeros(120), physical_range=(-1000.0, 1000.0))
    back = read_edf(path)
    assert np.allclose(back.samples, 1000.0 / 65535.0)


def test_roundtrip_within_one_quantization_step(tmp_path, rng):
    for trial in range(100):
        n_seconds = int(rng.integers(1, 5))
        rate = int(rng.choice([32, 120, 500]))
        lo = float(rng.uniform(-50.0, -1.0))
        hi = float(rng.uniform(1.0, 50.0))
        samples = rng.uniform(lo, hi, size=n_seconds * rate)
        rec, path = _write_simple(tmp_path, samples, rate=rate, physical_range=(lo, hi), name=f"r{trial}.edf")
        back = read_edf(path)
        step = (hi - lo) / 65535.0
        assert back.sample_rate_hz == rec.sample_rate_hz
        assert back.start_time == rec.start_time
        assert np.max(np.abs(back.samples - samples)) <= step * (1 + 1e-9)


def test_sample_count_exact_at_record_boundaries(tmp_path):
    rec, path = _write_simple(tmp_path, np.arange(120 * 7) * 1e-3)
    back = read_edf(path)
    assert len(back.samples) == 120 * 7
    assert float(back.duration_seconds) * float(back.sample_rate_hz) == len(back.samples)


def test_clamping_above_range(tmp_path):
    samples = np.array([10.0] + [0.0] * 119)
    _, path = _write_simple(tmp_path, samples, physical_range=(-1.0, 1.0))
    back = read_edf(path)
    assert back.samples[0] == pytest.approx(1.0)  # clamped to physical_max


def test_constant_midpoint_digital_value(tmp_path):
    _, path = _write_simple(tmp_path, np.full(120, 1.0), physical_range=(0.0, 2.0))
    raw = path.read_bytes()
    digital = np.frombuffer(raw[512:], dtype="<i2")
    assert np.all(digital == round((DIGITAL_MIN + DIGITAL_MAX) / 2))


def test_write_rejects_bad_range(tmp_path):
    rec = make_recording(np.zeros(120))
    with pytest.raises(DataError):
        write_edf(rec, (1.0, 1.0), tmp_path / "bad.edf")


def test_write_rejects_fractional_rate(tmp_path):
    from fractions import Fraction

    rec = make_recording(np.zeros(100), rate=1)
    object.__setattr__(rec, "sample_rate_hz", Fraction(5, 2))
    with pytest.raises(RateCompatibilityError):
        write_edf(rec, (-1, 1), tmp_path / "bad.edf")


def test_truncated_data_records(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(120 * 5))
    raw = path.read_bytes()
    path.write_bytes(raw[: 512 + 120 * 2 * 3 + 7])  # 3 complete records and a bit
    with pytest.raises(EdfTruncationError) as err:
        read_edf(path)
    assert err.value.expected_records == 5
    assert err.value.actual_records == 3


def test_multi_signal_rejected(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(120))
    raw = bytearray(path.read_bytes())
    raw[252:256] = b"2   "
    path.write_bytes(bytes(raw))
    with pytest.raises(UnsupportedLayoutError):
        read_edf(path)


def test_zero_signals_rejected(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(120))
    raw = bytearray(path.read_bytes())
    raw[252:256] = b"0   "
    path.write_bytes(bytes(raw))
    with pytest.raises(EdfFormatError):
        read_edf(path)


def test_degenerate_scaling_rejected(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(120))
    raw = bytearray(path.read_bytes())
    raw[376:384] = b"5       "  # digital_min
    raw[384:392] = b"5       "  # digital_max
    path.write_bytes(bytes(raw))
    with pytest.raises(DegenerateScalingError):
        read_edf(path)


def test_bad_version_rejected(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(120))
    raw = bytearray(path.read_bytes())
    raw[0:8] = b"9       "
    path.write_bytes(bytes(raw))
    with pytest.raises(EdfFormatError) as err:
        read_edf(path)
    assert err.value.byte_offset == 0


def test_non_numeric_field_rejected_with_offset(tmp_path):
    _, path = _write_simple(tmp_path, np.zeros(120))
    raw = bytearray(path.read_bytes())
    raw[236:244] = b"abc     "  # n_records
    path.write_bytes(bytes(raw))
    with pytest.raises(EdfFormatError) as err:
        read_edf(path)
    assert err.value.byte_offset == 236


def test_single_byte_header_corruptions_rejected(tmp_path, rng):
    _, path = _write_simple(tmp_path, np.zeros(120 * 3))
    good = path.read_bytes()
    offsets = rng.choice(512, size=50, replace=False)
    for offset in offsets:
        bad = bytearray(good)
        bad[offset] = 0xFF  # outside printable ASCII, illegal anywhere in the header
        path.write_bytes(bytes(bad))
        with pytest.raises(EdfFormatError):
            read_edf(path)


def test_start_time_parsing(tmp_path):
    rec = make_recording(np.zeros(120), start="2031-12-31T23:59:58")
    path = tmp_path / "t.edf"
    write_edf(rec, (-1, 1), path)
    assert read_edf(path).start_time == rec.start_time


def test_yy_pivot_1985():
    from datetime import timezone

    from seizurekit.edf import _parse_start

    header = bytearray(b" " * 256)
    header[168:176] = b"01.02.85"
    header[176:184] = b"10.20.30"
    start = _parse_start(bytes(header))
    assert start.year == 1985 and start.tzinfo == timezone.utc
    header[168:176] = b"01.02.84"
    assert _parse_start(bytes(header)).year == 2084
