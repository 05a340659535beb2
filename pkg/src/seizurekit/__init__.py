"""Multi-modal time-series seizure detection toolkit.

Pipeline: EDF/CSV ingestion -> sliding windows -> FFT magnitude features ->
time-series forest probabilities per modality -> timestamp-aligned weighted
fusion -> thresholding, isolated-positive removal, and event grouping ->
framewise and event-overlap metrics. A seeded synthetic generator produces
paper-shaped datasets for desk-scale runs.
"""

from .csvio import (
    read_annotations,
    read_prediction_stream,
    write_annotations,
    write_prediction_stream,
)
from .edf import read_edf, write_edf
from .errors import DataError, SeizureKitError
from .events import (
    SweepResult,
    binarize,
    detect_events,
    group_events,
    read_events,
    remove_isolated,
    report,
    sweep,
    write_events,
)
from .forest import (
    ForestModel,
    ForestParams,
    Interval,
    interval_features,
    load_model,
    predict,
    predict_stream,
    save_model,
    train,
)
from .fusion import AlignedFrame, FusionWeights, align, fuse, fuse_streams
from .metrics import (
    EventMetrics,
    FrameMetrics,
    auc_check,
    event_metrics,
    frame_metrics,
    rank_auc,
)
from .spectral import FeatureWindowSet, fft_magnitude, raw_feature_set, transform_set
from .synth import SynthConfig, SynthDataset, generate
from .types import (
    PredictionStream,
    SeizureAnnotation,
    SeizureEvent,
    SignalRecording,
)
from .windows import LabeledWindowSet, make_windows, undersample

__version__ = "0.1.0"

__all__ = [
    "AlignedFrame",
    "DataError",
    "EventMetrics",
    "FeatureWindowSet",
    "ForestModel",
    "ForestParams",
    "FrameMetrics",
    "FusionWeights",
    "Interval",
    "LabeledWindowSet",
    "PredictionStream",
    "SeizureAnnotation",
    "SeizureEvent",
    "SeizureKitError",
    "SignalRecording",
    "SweepResult",
    "SynthConfig",
    "SynthDataset",
    "align",
    "auc_check",
    "binarize",
    "detect_events",
    "event_metrics",
    "fft_magnitude",
    "frame_metrics",
    "fuse",
    "fuse_streams",
    "generate",
    "group_events",
    "interval_features",
    "load_model",
    "make_windows",
    "predict",
    "predict_stream",
    "rank_auc",
    "raw_feature_set",
    "read_annotations",
    "read_edf",
    "read_events",
    "read_prediction_stream",
    "remove_isolated",
    "report",
    "save_model",
    "sweep",
    "train",
    "transform_set",
    "undersample",
    "write_annotations",
    "write_edf",
    "write_events",
    "write_prediction_stream",
]
