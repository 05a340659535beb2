"""Pipeline configuration: a flat `key = value` text file plus flag overrides.

Lines are `key = value`; `#` starts a comment; `none` clears an optional
value. Flags always win over the file. The effective configuration is
hashed (sha256 over its canonical serialization) and that hash is stamped
into every output the pipeline writes, so artifacts can be traced back to
the exact settings that produced them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .forest import ForestParams
from .fusion import FusionWeights
from .synth import SynthConfig
from .types import parse_utc


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    out_dir: str = "out"

    window_s: int = 60
    stride_s: int = 10
    undersample_ratio: float = 1.0

    fft: bool = True
    log_magnitude: bool = False
    n_trees: int = 100
    intervals_per_tree: int | None = None  # None: sqrt of the series length
    min_interval_len: int = 3
    max_depth: int | None = None
    min_samples_leaf: int = 1

    threshold: float = 0.5
    w_ecog: float = 0.5
    w_piezo: float = 0.2
    w_video: float = 0.3
    events_stream: str = "fused"
    metrics_stream: str = "fused"

    duration_s: int = 86400
    n_seizures: int = 4
    seizure_min_s: int = 30
    seizure_max_s: int = 60
    ecog_rate_hz: int = 500
    piezo_rate_hz: int = 120
    background_amplitude: float = 1.0
    ecog_burst_gain: float = 1.0
    piezo_burst_gain: float = 0.7
    ecog_band_lo_hz: float = 18.0
    ecog_band_hi_hz: float = 24.0
    piezo_band_lo_hz: float = 4.0
    piezo_band_hi_hz: float = 8.0
    ecog_noise: float = 0.3
    piezo_noise: float = 0.3
    artifact_rate_per_hour: float = 4.0
    artifact_min_s: int = 3
    artifact_max_s: int = 10
    video_coverage: float = 0.35
    video_flip_prob: float = 0.05
    animal_id: str = "rat0"
    start_time: str = "2024-01-01T00:00:00Z"

    bench_duration_s: int = 1800
    bench_n_seizures: int = 2

    # file locations; None means "derived from out_dir by convention"
    ecog_edf: str | None = None
    piezo_edf: str | None = None
    annotations_csv: str | None = None
    video_csv: str | None = None
    model_ecog: str | None = None
    model_piezo: str | None = None

    # -- derived paths ----------------------------------------------------
    def path(self, key: str, default_name: str) -> Path:
        configured = getattr(self, key)
        if configured is not None:
            return Path(configured)
        return Path(self.out_dir) / default_name

    def edf_path(self, modality: str) -> Path:
        return self.path(f"{modality}_edf", f"{modality}.edf")

    def annotations_path(self) -> Path:
        return self.path("annotations_csv", "annotations.csv")

    def video_path(self) -> Path:
        return self.path("video_csv", "predictions_video.csv")

    def model_path(self, modality: str) -> Path:
        return self.path(f"model_{modality}", f"model_{modality}.skf")

    def stream_path(self, tag: str) -> Path:
        if tag == "video":
            return self.video_path()
        return Path(self.out_dir) / f"predictions_{tag}.csv"

    # -- adapters to module-level parameter objects -----------------------
    def forest_params(self) -> ForestParams:
        return ForestParams(
            n_trees=self.n_trees,
            intervals_per_tree=self.intervals_per_tree,
            min_interval_len=self.min_interval_len,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            seed=self.seed,
        )

    def fusion_weights(self) -> FusionWeights:
        return FusionWeights(w_ecog=self.w_ecog, w_piezo=self.w_piezo, w_video=self.w_video)

    def synth_config(self, duration_s: int | None = None, n_seizures: int | None = None) -> SynthConfig:
        return SynthConfig(
            duration_s=self.duration_s if duration_s is None else duration_s,
            n_seizures=self.n_seizures if n_seizures is None else n_seizures,
            seizure_duration_range_s=(self.seizure_min_s, self.seizure_max_s),
            ecog_rate_hz=self.ecog_rate_hz,
            piezo_rate_hz=self.piezo_rate_hz,
            background_amplitude=self.background_amplitude,
            ecog_burst_band_hz=(self.ecog_band_lo_hz, self.ecog_band_hi_hz),
            piezo_burst_band_hz=(self.piezo_band_lo_hz, self.piezo_band_hi_hz),
            ecog_burst_gain=self.ecog_burst_gain,
            piezo_burst_gain=self.piezo_burst_gain,
            ecog_noise=self.ecog_noise,
            piezo_noise=self.piezo_noise,
            artifact_rate_per_hour=self.artifact_rate_per_hour,
            artifact_duration_range_s=(self.artifact_min_s, self.artifact_max_s),
            video_coverage_fraction=self.video_coverage,
            video_flip_probability=self.video_flip_prob,
            window_s=self.window_s,
            stride_s=self.stride_s,
            animal_id=self.animal_id,
            start_time=parse_utc(self.start_time),
            seed=self.seed,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}
_OPTIONAL_STR = {"ecog_edf", "piezo_edf", "annotations_csv", "video_csv", "model_ecog", "model_piezo"}
_OPTIONAL_INT = {"intervals_per_tree", "max_depth"}


def _parse_value(key: str, text: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    text = text.strip()
    if key in _OPTIONAL_STR or key in _OPTIONAL_INT:
        if text.lower() == "none" or text == "":
            return None
        if key in _OPTIONAL_INT:
            try:
                return int(text)
            except ValueError:
                raise ConfigError(f"{key}: expected an integer or 'none', got {text!r}") from None
        return text
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        return text
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def load_config(path: str | Path | None) -> PipelineConfig:
    """Parse a config file; a missing path gives all defaults."""
    values: dict[str, object] = {}
    if path is not None:
        try:
            content = Path(path).read_text(encoding="ascii")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for no, line in enumerate(content.splitlines(), start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{no}: expected 'key = value', got {text!r}")
            key, _, value = text.partition("=")
            key = key.strip()
            values[key] = _parse_value(key, value)
    cfg = PipelineConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: PipelineConfig) -> None:
    if not 0.0 <= cfg.threshold <= 1.0:
        raise ConfigError(f"threshold {cfg.threshold} outside [0, 1]")
    if cfg.undersample_ratio <= 0:
        raise ConfigError("undersample_ratio must be positive")
    if cfg.window_s < 1 or cfg.stride_s < 1:
        raise ConfigError("window_s and stride_s must be positive")
    if min(cfg.w_ecog, cfg.w_piezo, cfg.w_video) < 0 or cfg.w_ecog + cfg.w_piezo + cfg.w_video <= 0:
        raise ConfigError("fusion weights must be non-negative with a positive sum")
    if cfg.events_stream not in ("ecog", "piezo", "video", "fused"):
        raise ConfigError(f"events_stream {cfg.events_stream!r} unknown")
    if cfg.metrics_stream not in ("ecog", "piezo", "video", "fused"):
        raise ConfigError(f"metrics_stream {cfg.metrics_stream!r} unknown")
    parse_utc(cfg.start_time)


def with_overrides(cfg: PipelineConfig, **overrides) -> PipelineConfig:
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return cfg
    out = replace(cfg, **updates)
    _validate(out)
    return out


_PATH_FIELDS = frozenset(_OPTIONAL_STR) | {"out_dir"}


def config_hash(cfg: PipelineConfig) -> str:
    """Short stable hash of the effective configuration.

    File locations are excluded: the hash identifies the experiment
    parameters, so the same pipeline writes byte-identical artifacts into
    any output directory.
    """
    canon = "\n".join(
        f"{f.name}={getattr(cfg, f.name)!r}"
        for f in sorted(fields(cfg), key=lambda f: f.name)
        if f.name not in _PATH_FIELDS
    )
    return hashlib.sha256(canon.encode("ascii")).hexdigest()[:16]
