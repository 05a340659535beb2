"""Reader/writer for a strict single-signal subset of European Data Format.

Layout (all header fields space-padded printable ASCII):

    offset  size  field
    0       8     version, always "0"
    8       80    local patient identification
    88      80    local recording identification
    168     8     startdate, dd.mm.yy (yy >= 85 means 19yy, else 20yy)
    176     8     starttime, hh.mm.ss
    184     8     number of bytes in header record
    192     44    reserved
    236     8     number of data records (must be >= 0; -1 "unknown" rejected)
    244     8     duration of one data record, seconds
    252     4     number of signals (this subset: exactly 1)
    256     256   signal header: label(16) transducer(80) physical dim(8)
                  physical min(8) physical max(8) digital min(8)
                  digital max(8) prefiltering(80) samples per record(8)
                  reserved(32)
    512     ...   data records, 16-bit little-endian two's complement

Scaling: physical = (digital - dig_min) * (phys_max - phys_min)
                    / (dig_max - dig_min) + phys_min
"""

from __future__ import annotations

from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    DegenerateScalingError,
    EdfFormatError,
    EdfTruncationError,
    RateCompatibilityError,
    UnsupportedLayoutError,
)
from .types import SignalRecording

FIXED_HEADER_BYTES = 256
SIGNAL_HEADER_BYTES = 256
DIGITAL_MIN = -32768
DIGITAL_MAX = 32767

_FIXED_FIELDS = (
    ("version", 0, 8),
    ("patient_id", 8, 80),
    ("recording_id", 88, 80),
    ("startdate", 168, 8),
    ("starttime", 176, 8),
    ("header_bytes", 184, 8),
    ("reserved", 192, 44),
    ("n_records", 236, 8),
    ("record_duration", 244, 8),
    ("n_signals", 252, 4),
)

# per-signal field widths in file order
_SIGNAL_FIELDS = (
    ("label", 16),
    ("transducer", 80),
    ("physical_dimension", 8),
    ("physical_min", 8),
    ("physical_max", 8),
    ("digital_min", 8),
    ("digital_max", 8),
    ("prefiltering", 80),
    ("samples_per_record", 8),
    ("signal_reserved", 32),
)


def _check_ascii(raw: bytes, start: int) -> None:
    for i, b in enumerate(raw):
        if not 0x20 <= b <= 0x7E:
            raise EdfFormatError(
                f"non-ASCII byte 0x{b:02x} in header", byte_offset=start + i
            )


def _text(raw: bytes, offset: int, width: int) -> str:
    return raw[offset : offset + width].decode("ascii").strip()


def _int_field(raw: bytes, offset: int, width: int, name: str) -> int:
    text = _text(raw, offset, width)
    try:
        return int(text)
    except ValueError:
        raise EdfFormatError(
            f"field {name!r} is not an integer: {text!r}", byte_offset=offset
        ) from None


def _float_field(raw: bytes, offset: int, width: int, name: str) -> float:
    text = _text(raw, offset, width)
    try:
        return float(text)
    except ValueError:
        raise EdfFormatError(
            f"field {name!r} is not numeric: {text!r}", byte_offset=offset
        ) from None


def _parse_start(raw: bytes) -> datetime:
    date_text = _text(raw, 168, 8)
    time_text = _text(raw, 176, 8)
    try:
        day, month, yy = (int(p) for p in date_text.split("."))
        hour, minute, second = (int(p) for p in time_text.split("."))
        year = 1900 + yy if yy >= 85 else 2000 + yy
        return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)
    except ValueError as exc:
        raise EdfFormatError(
            f"bad startdate/starttime {date_text!r} {time_text!r}: {exc}",
            byte_offset=168,
        ) from None


def read_edf(path: str | Path) -> SignalRecording:
    """Read a single-signal EDF file into physical-valued samples.

    Raises EdfFormatError (with the byte offset), EdfTruncationError,
    DegenerateScalingError, or UnsupportedLayoutError on files outside
    the supported subset.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if len(raw) < FIXED_HEADER_BYTES:
        raise EdfFormatError(
            f"file is {len(raw)} bytes, shorter than the fixed {FIXED_HEADER_BYTES}-byte header",
            byte_offset=len(raw),
        )
    _check_ascii(raw[:FIXED_HEADER_BYTES], 0)

    version = _text(raw, 0, 8)
    if version != "0":
        raise EdfFormatError(f"unsupported version field {version!r}", byte_offset=0)

    n_signals = _int_field(raw, 252, 4, "n_signals")
    if n_signals < 1:
        raise EdfFormatError(
            f"header declares {n_signals} signals, need at least 1", byte_offset=252
        )
    if n_signals != 1:
        raise UnsupportedLayoutError(
            f"file declares {n_signals} signals; this reader supports exactly 1"
        )

    header_bytes = _int_field(raw, 184, 8, "header_bytes")
    expected_header = FIXED_HEADER_BYTES + n_signals * SIGNAL_HEADER_BYTES
    if header_bytes != expected_header:
        raise EdfFormatError(
            f"header size field says {header_bytes}, expected {expected_header}",
            byte_offset=184,
        )
    if len(raw) < expected_header:
        raise EdfFormatError(
            f"file is {len(raw)} bytes, shorter than the declared {expected_header}-byte header",
            byte_offset=len(raw),
        )
    _check_ascii(raw[FIXED_HEADER_BYTES:expected_header], FIXED_HEADER_BYTES)

    n_records = _int_field(raw, 236, 8, "n_records")
    if n_records < 0:
        raise EdfFormatError(
            f"number of data records must be >= 0, got {n_records}", byte_offset=236
        )
    duration_text = _text(raw, 244, 8)
    try:
        record_duration = Fraction(duration_text)
    except (ValueError, ZeroDivisionError):
        raise EdfFormatError(
            f"record duration is not numeric: {duration_text!r}", byte_offset=244
        ) from None
    if record_duration <= 0:
        raise EdfFormatError(
            f"record duration must be positive, got {duration_text!r}", byte_offset=244
        )

    start = _parse_start(raw)

    offset = FIXED_HEADER_BYTES
    fields: dict[str, tuple[int, int]] = {}
    for name, width in _SIGNAL_FIELDS:
        fields[name] = (offset, width)
        offset += width * n_signals

    label = _text(raw, *fields["label"])
    phys_dim = _text(raw, *fields["physical_dimension"])
    phys_min = _float_field(raw, *fields["physical_min"], "physical_min")
    phys_max = _float_field(raw, *fields["physical_max"], "physical_max")
    dig_min = _int_field(raw, *fields["digital_min"], "digital_min")
    dig_max = _int_field(raw, *fields["digital_max"], "digital_max")
    spr = _int_field(raw, *fields["samples_per_record"], "samples_per_record")
    if spr < 1:
        raise EdfFormatError(f"samples_per_record must be >= 1, got {spr}", byte_offset=fields["samples_per_record"][0])
    if dig_min == dig_max:
        raise DegenerateScalingError(
            f"digital_min == digital_max == {dig_min}: scaling undefined"
        )

    data = raw[expected_header:]
    record_bytes = spr * 2
    complete = len(data) // record_bytes
    if len(data) != n_records * record_bytes:
        raise EdfTruncationError(expected_records=n_records, actual_records=complete)

    digital = np.frombuffer(data, dtype="<i2").astype(np.float64)
    scale = (phys_max - phys_min) / (dig_max - dig_min)
    samples = (digital - dig_min) * scale + phys_min

    return SignalRecording(
        samples=samples,
        sample_rate_hz=Fraction(spr) / record_duration,
        start_time=start,
        channel_label=label,
        physical_dimension=phys_dim,
    )


def _pad(text: str, width: int, offset: int) -> bytes:
    encoded = text.encode("ascii")
    if len(encoded) > width:
        raise DataError(f"header field {text!r} exceeds {width} ASCII bytes")
    _check_ascii(encoded, offset)
    return encoded.ljust(width)


def _ascii_float(x: float) -> str:
    """Shortest %g rendering of x that fits the 8-char EDF numeric fields."""
    for precision in range(7, -1, -1):
        text = f"{x:.{precision}g}"
        if len(text) <= 8:
            return text
    raise DataError(f"cannot encode {x!r} in an 8-char EDF field")


def write_edf(
    recording: SignalRecording,
    physical_range: tuple[float, float],
    path: str | Path,
) -> None:
    """Write a single-signal EDF file with 1 s data records.

    Samples are quantized to 16 bits over physical_range; samples outside
    the range are clamped to its edges (acquisition-style saturation).
    The recording must span a whole number of seconds at an integer rate
    so that 1 s records divide it exactly.
    """
    phys_min, phys_max = float(physical_range[0]), float(physical_range[1])
    if not phys_min < phys_max:
        raise DataError(f"physical_range must satisfy min < max, got {physical_range}")

    rate = recording.sample_rate_hz
    if rate.denominator != 1:
        raise RateCompatibilityError(
            f"1 s data records need an integer sample rate, got {rate}"
        )
    spr = rate.numerator
    n_samples = len(recording.samples)
    if n_samples == 0 or n_samples % spr != 0:
        raise DataError(
            f"{n_samples} samples at {spr} Hz is not a whole number of 1 s records"
        )
    n_records = n_samples // spr

    start = recording.start_time.astimezone(timezone.utc)
    if not 1985 <= start.year <= 2084:
        raise DataError(f"start year {start.year} outside the EDF yy pivot range 1985-2084")

    # Encode the range first, then quantize against the values a reader will
    # parse back, so write/read round-trips are exact to one digital step.
    pmin_text = _ascii_float(phys_min)
    pmax_text = _ascii_float(phys_max)
    pmin, pmax = float(pmin_text), float(pmax_text)
    if not pmin < pmax:
        raise DataError(
            f"physical_range {physical_range} collapses when encoded to ASCII fields"
        )

    clamped = np.clip(np.asarray(recording.samples, dtype=np.float64), pmin, pmax)
    scale = (DIGITAL_MAX - DIGITAL_MIN) / (pmax - pmin)
    digital = np.rint((clamped - pmin) * scale + DIGITAL_MIN)
    digital = np.clip(digital, DIGITAL_MIN, DIGITAL_MAX).astype("<i2")

    header = bytearray()
    header += _pad("0", 8, 0)
    header += _pad("X", 80, 8)
    header += _pad("X", 80, 88)
    header += _pad(start.strftime("%d.%m.%y"), 8, 168)
    header += _pad(start.strftime("%H.%M.%S"), 8, 176)
    header += _pad(str(FIXED_HEADER_BYTES + SIGNAL_HEADER_BYTES), 8, 184)
    header += _pad("", 44, 192)
    header += _pad(str(n_records), 8, 236)
    header += _pad("1", 8, 244)
    header += _pad("1", 4, 252)

    header += _pad(recording.channel_label, 16, 256)
    header += _pad("", 80, 272)
    header += _pad(recording.physical_dimension, 8, 352)
    header += _pad(pmin_text, 8, 360)
    header += _pad(pmax_text, 8, 368)
    header += _pad(str(DIGITAL_MIN), 8, 376)
    header += _pad(str(DIGITAL_MAX), 8, 384)
    header += _pad("", 80, 392)
    header += _pad(str(spr), 8, 472)
    header += _pad("", 32, 480)

    Path(path).write_bytes(bytes(header) + digital.tobytes())
