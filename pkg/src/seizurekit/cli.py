"""Batch command-line front end wiring the pipeline stages together.

Commands: synth, train, predict, fuse, events, metrics, bench. Every
command takes --config/--out-dir/--seed; outputs are stamped with the
effective config hash and reruns with identical settings are byte-identical
(bench excepted: it reports measured wall time).

Exit codes: 0 success, 1 usage/config error, 2 data or format error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, config_hash, load_config, with_overrides
from .csvio import (
    read_annotations,
    read_prediction_stream,
    write_annotations,
    write_prediction_stream,
)
from .edf import read_edf, write_edf
from .errors import ConfigError, SeizureKitError
from .events import detect_events, report, sweep
from .forest import load_model, predict_stream, save_model, train
from .fusion import fuse_streams
from .metrics import event_metrics, frame_metrics
from .spectral import raw_feature_set, transform_set
from .synth import generate
from .types import format_probability
from .windows import label_windows, make_windows, undersample


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise _UsageError(f"{self.prog}: {message}")


def _write_manifest(cfg: PipelineConfig, command: str, outputs: list[Path]) -> None:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config_hash": config_hash(cfg),
        "outputs": sorted(str(p) for p in outputs),
    }
    (out_dir / f"manifest_{command}.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="ascii"
    )


def _stamp(cfg: PipelineConfig) -> str:
    return f"config_hash={config_hash(cfg)}"


def _cmd_synth(cfg: PipelineConfig) -> int:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = generate(cfg.synth_config())

    outputs = []
    for modality, recording in (("ecog", dataset.ecog), ("piezo", dataset.piezo)):
        peak = float(np.max(np.abs(recording.samples))) * 1.01 + 1e-9
        path = cfg.edf_path(modality)
        write_edf(recording, (-peak, peak), path)
        outputs.append(path)

    ann_path = cfg.annotations_path()
    write_annotations(dataset.annotations, ann_path, header_comment=_stamp(cfg))
    outputs.append(ann_path)

    video_path = cfg.video_path()
    write_prediction_stream(dataset.video_stream, video_path, header_comment=_stamp(cfg))
    outputs.append(video_path)

    _write_manifest(cfg, "synth", outputs)
    print(f"synth: wrote {len(outputs)} file(s) to {out_dir} ({_stamp(cfg)})")
    return 0


def _features_for(cfg: PipelineConfig, window_set, fft: bool, log_magnitude: bool):
    if fft:
        return transform_set(window_set, log_magnitude=log_magnitude)
    return raw_feature_set(window_set)


def _cmd_train(cfg: PipelineConfig, modality: str) -> int:
    recording = read_edf(cfg.edf_path(modality))
    annotations = read_annotations(cfg.annotations_path())
    window_set = make_windows(recording, annotations, cfg.window_s, cfg.stride_s)
    balanced = undersample(window_set, cfg.undersample_ratio, seed=cfg.seed)
    features = _features_for(cfg, balanced, cfg.fft, cfg.log_magnitude)
    model = train(features, cfg.forest_params(), modality=modality)
    model.tag = config_hash(cfg)
    path = cfg.model_path(modality)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, path)
    _write_manifest(cfg, f"train_{modality}", [path])
    print(
        f"train: {modality} forest ({model.n_trees} trees on {balanced.n_windows} windows, "
        f"{int(balanced.labels.sum())} positive) -> {path}"
    )
    return 0


def _cmd_predict(cfg: PipelineConfig, modality: str) -> int:
    model = load_model(cfg.model_path(modality))
    recording = read_edf(cfg.edf_path(modality))
    window_set = make_windows(recording, [], model.window_s, model.stride_s)
    features = _features_for(cfg, window_set, model.feature_kind == "fft", model.log_magnitude)
    stream = predict_stream(model, features)
    path = cfg.stream_path(modality)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_prediction_stream(stream, path, header_comment=_stamp(cfg))
    _write_manifest(cfg, f"predict_{modality}", [path])
    print(f"predict: {len(stream)} probabilities -> {path}")
    return 0


def _cmd_fuse(cfg: PipelineConfig) -> int:
    streams = [
        read_prediction_stream(cfg.stream_path("ecog"), "ecog"),
        read_prediction_stream(cfg.stream_path("piezo"), "piezo"),
    ]
    video_path = cfg.video_path()
    if video_path.exists():
        streams.append(read_prediction_stream(video_path, "video"))
    fused = fuse_streams(streams, cfg.fusion_weights())
    path = cfg.stream_path("fused")
    path.parent.mkdir(parents=True, exist_ok=True)
    write_prediction_stream(fused, path, header_comment=_stamp(cfg))
    _write_manifest(cfg, "fuse", [path])
    modalities = ", ".join(s.modality for s in streams)
    print(f"fuse: {modalities} -> {path} ({len(fused)} frames)")
    return 0


def _cmd_events(cfg: PipelineConfig, do_sweep: bool) -> int:
    stream = read_prediction_stream(cfg.stream_path(cfg.events_stream), cfg.events_stream)
    selected = None
    if do_sweep:
        annotations = read_annotations(cfg.annotations_path())
        _, selected = sweep(stream, annotations, cfg.window_s, cfg.stride_s)
        threshold = selected.threshold
    else:
        threshold = cfg.threshold
    events = detect_events(stream, threshold, cfg.window_s, cfg.stride_s)
    csv_path, txt_path = report(events, selected, cfg.out_dir, header_comment=_stamp(cfg))
    _write_manifest(cfg, "events", [csv_path, txt_path])
    if selected is not None:
        print(
            f"events: sweep selected threshold {format_probability(selected.threshold)} "
            f"({selected.n_true_detected} detected, "
            f"{selected.n_false_positive_events} false positive events)"
        )
    print(f"events: {len(events)} event(s) -> {csv_path}, {txt_path}")
    return 0


def _cmd_metrics(cfg: PipelineConfig) -> int:
    stream = read_prediction_stream(cfg.stream_path(cfg.metrics_stream), cfg.metrics_stream)
    annotations = read_annotations(cfg.annotations_path())
    labels = label_windows(stream.timestamps, cfg.window_s, annotations)
    fm = frame_metrics(stream.probabilities, labels, cfg.threshold)
    events = detect_events(stream, cfg.threshold, cfg.window_s, cfg.stride_s)
    em = event_metrics(events, annotations)

    rows = [
        ("accuracy", fm.accuracy),
        ("precision", fm.precision),
        ("recall", fm.recall),
        ("auc", fm.auc if fm.auc is not None else "undefined"),
        ("tp", fm.tp),
        ("fp", fm.fp),
        ("tn", fm.tn),
        ("fn", fm.fn),
        ("n_true_events", em.n_true_events),
        ("n_detected", em.n_detected),
        ("n_false_positive_events", em.n_false_positive_events),
    ]
    path = Path(cfg.out_dir) / "metrics.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {_stamp(cfg)}", "modality,metric,value"]
    for name, value in rows:
        text = format_probability(value) if isinstance(value, float) else str(value)
        lines.append(f"{cfg.metrics_stream},{name},{text}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    _write_manifest(cfg, "metrics", [path])
    print(f"metrics: {cfg.metrics_stream} @ threshold {cfg.threshold:g} -> {path}")
    return 0


def _cmd_bench(cfg: PipelineConfig) -> int:
    """Real-time factor of the inference path (windowing + FFT + predict +
    fuse + postprocess) over a seeded dataset; training time excluded."""
    duration = cfg.bench_duration_s
    dataset = generate(cfg.synth_config(duration_s=duration, n_seizures=cfg.bench_n_seizures))

    models = {}
    for modality, recording in (("ecog", dataset.ecog), ("piezo", dataset.piezo)):
        window_set = make_windows(recording, dataset.annotations, cfg.window_s, cfg.stride_s)
        balanced = undersample(window_set, cfg.undersample_ratio, seed=cfg.seed)
        models[modality] = train(
            transform_set(balanced), cfg.forest_params(), modality=modality
        )

    start = time.perf_counter()
    streams = []
    for modality, recording in (("ecog", dataset.ecog), ("piezo", dataset.piezo)):
        window_set = make_windows(recording, [], cfg.window_s, cfg.stride_s)
        features = transform_set(window_set)
        streams.append(predict_stream(models[modality], features))
    fused = fuse_streams(streams, cfg.fusion_weights())
    detect_events(fused, cfg.threshold, cfg.window_s, cfg.stride_s)
    elapsed = time.perf_counter() - start

    per_10s = 10.0 * elapsed / duration
    rtf = elapsed / duration
    print(
        f"bench: {duration} s of ECoG+Piezo processed in {elapsed:.2f} s wall time\n"
        f"bench: {per_10s:.4f} s of processing per 10 s of signal "
        f"(real-time factor {rtf:.5f}, {'<' if rtf < 1 else '>='} 1 required for live use)"
    )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench.txt").write_text(
        f"{_stamp(cfg)}\nsignal_seconds={duration}\nwall_seconds={elapsed:.4f}\n"
        f"seconds_per_10s={per_10s:.6f}\nreal_time_factor={rtf:.8f}\n",
        encoding="ascii",
    )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="seizurekit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"seizurekit {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(p):
        p.add_argument("--config", help="config file (key = value lines)")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        p.add_argument("--seed", type=int, help="master seed override")

    common(sub.add_parser("synth", help="generate a seeded synthetic dataset"))

    for name in ("train", "predict"):
        p = sub.add_parser(name, help=f"{name} one modality's forest")
        common(p)
        p.add_argument("--modality", choices=("ecog", "piezo"), required=True)

    p = sub.add_parser("fuse", help="align and fuse per-modality streams")
    common(p)
    p.add_argument("--weights", help="comma-separated ecog,piezo,video weights")

    p = sub.add_parser("events", help="threshold/sweep a stream into events + report")
    common(p)
    p.add_argument("--threshold", type=float, help="probability cutoff")
    p.add_argument("--sweep", action="store_true", help="select the threshold by sweep")

    p = sub.add_parser("metrics", help="framewise and event metrics for a stream")
    common(p)
    p.add_argument("--threshold", type=float, help="probability cutoff")

    common(sub.add_parser("bench", help="measure the inference real-time factor"))
    return parser


def _weights_from_flag(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"--weights expects 'ecog,piezo,video', got {text!r}")
    try:
        e, p, v = (float(x) for x in parts)
    except ValueError:
        raise _UsageError(f"--weights values must be numeric, got {text!r}") from None
    return {"w_ecog": e, "w_piezo": p, "w_video": v}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("missing command (try --help)")
        cfg = load_config(args.config)
        overrides: dict = {"out_dir": args.out_dir, "seed": args.seed}
        if getattr(args, "threshold", None) is not None:
            overrides["threshold"] = args.threshold
        if getattr(args, "weights", None):
            overrides.update(_weights_from_flag(args.weights))
        cfg = with_overrides(cfg, **overrides)

        if args.command == "synth":
            return _cmd_synth(cfg)
        if args.command == "train":
            return _cmd_train(cfg, args.modality)
        if args.command == "predict":
            return _cmd_predict(cfg, args.modality)
        if args.command == "fuse":
            return _cmd_fuse(cfg)
        if args.command == "events":
            return _cmd_events(cfg, args.sweep)
        if args.command == "metrics":
            return _cmd_metrics(cfg)
        if args.command == "bench":
            return _cmd_bench(cfg)
        raise _UsageError(f"unknown command {args.command!r}")
    except (_UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SeizureKitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse --help/--version
        return int(exc.code or 0)
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
