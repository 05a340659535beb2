"""Time-series forest: decision trees over per-interval summary features.

Each tree draws its own random intervals of the feature series (seeded per
tree from the master seed, so results do not depend on evaluation order),
summarizes every interval by mean, population standard deviation, and
least-squares slope, and fits a binary decision tree that greedily
minimizes Gini impurity. Split thresholds are midpoints between sorted
distinct feature values; ties are broken by lowest feature index, then
lowest threshold. A window's probability is the average over trees of the
positive fraction of the leaf it reaches.

Model file layout (little-endian, checksummed):

    magic b"SKTF" | u32 version | u32 header_len | header JSON (sorted keys)
    per tree:
        u32 n_intervals | n_intervals x (u32 start, u32 length)
        u32 n_nodes     | i32 feature[n] | f64 threshold[n]
                        | i32 left[n] | i32 right[n]
                        | u32 n_pos[n] | u32 n_neg[n]
    sha256 of everything above (32 bytes)

Leaves have feature == -1 and left == right == -1; n_pos/n_neg are the
training sample counts reaching each node.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataError,
    FeatureShapeError,
    IntervalBoundsError,
    ModelIntegrityError,
    ModelVersionError,
    NoPositiveClassError,
)
from .spectral import FeatureWindowSet
from .types import PredictionStream

MODEL_MAGIC = b"SKTF"
MODEL_VERSION = 1

_PREDICT_CHUNK_ROWS = 256


@dataclass(frozen=True)
class Interval:
    """Half-open index range [start, start + length) of a feature series."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 1:
            raise IntervalBoundsError(f"bad interval start={self.start} length={self.length}")


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    intervals_per_tree: int | None = None  # None: max(1, floor(sqrt(series_len)))
    min_interval_len: int = 3
    max_depth: int | None = None
    min_samples_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.min_interval_len < 1 or self.min_samples_leaf < 1:
            raise DataError(f"forest parameters must be positive: {self}")
        if self.intervals_per_tree is not None and self.intervals_per_tree < 1:
            raise DataError("intervals_per_tree must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise DataError("max_depth must be positive or None")

    def resolved_intervals(self, series_len: int) -> int:
        if self.intervals_per_tree is not None:
            return self.intervals_per_tree
        return max(1, int(math.isqrt(series_len)))


@dataclass
class Tree:
    """Flattened decision tree plus the intervals that define its features."""

    intervals: np.ndarray  # (k, 2) int64: start, length
    feature: np.ndarray  # int32, -1 at leaves
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    n_pos: np.ndarray  # uint32 training samples per node
    n_neg: np.ndarray  # uint32

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)


@dataclass
class ForestModel:
    trees: list[Tree]
    params: ForestParams
    feature_len: int
    modality: str
    feature_kind: str = "fft"  # "fft" or "raw"
    window_s: int = 60
    stride_s: int = 10
    log_magnitude: bool = False
    tag: str = ""  # free-form provenance (the CLI stores its config hash here)

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def _prefix_sums(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative sums of y, y^2, and index*y along each row, zero-prefixed."""
    rows = np.asarray(rows, dtype=np.float64)
    m, length = rows.shape
    p1 = np.zeros((m, length + 1))
    p2 = np.zeros((m, length + 1))
    p3 = np.zeros((m, length + 1))
    np.cumsum(rows, axis=1, out=p1[:, 1:])
    np.cumsum(rows * rows, axis=1, out=p2[:, 1:])
    np.cumsum(rows * np.arange(length, dtype=np.float64), axis=1, out=p3[:, 1:])
    return p1, p2, p3


def _features_from_prefix(
    prefixes: tuple[np.ndarray, np.ndarray, np.ndarray],
    intervals: np.ndarray,
) -> np.ndarray:
    """(m, 3k) matrix of [mean, std, slope] per interval, interleaved."""
    p1, p2, p3 = prefixes
    starts = intervals[:, 0]
    lengths = intervals[:, 1].astype(np.float64)
    ends = intervals[:, 0] + intervals[:, 1]

    s1 = p1[:, ends] - p1[:, starts]
    mean = s1 / lengths
    var = (p2[:, ends] - p2[:, starts]) / lengths - mean * mean
    std = np.sqrt(np.maximum(var, 0.0))

    # slope of least-squares fit against local positions 0..L-1; 0 when L == 1
    sxy = (p3[:, ends] - p3[:, starts]) - starts * s1
    num = sxy - mean * (lengths * (lengths - 1.0) / 2.0)
    den = lengths * (lengths * lengths - 1.0) / 12.0
    slope = np.divide(num, den, out=np.zeros_like(num), where=den > 0)

    return np.stack([mean, std, slope], axis=2).reshape(mean.shape[0], -1)


def batch_interval_features(rows: np.ndarray, intervals: np.ndarray) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    intervals = np.asarray(intervals, dtype=np.int64)
    if intervals.size and np.any(intervals[:, 0] + intervals[:, 1] > rows.shape[1]):
        raise IntervalBoundsError("interval exceeds series length")
    return _features_from_prefix(_prefix_sums(rows), intervals)


def interval_features(series: np.ndarray, interval: Interval) -> tuple[float, float, float]:
    """(mean, population std, least-squares slope) of one interval of a series."""
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1:
        raise DataError("series must be 1-d")
    if interval.start + interval.length > series.size:
        raise IntervalBoundsError(
            f"interval [{interval.start}, {interval.start + interval.length}) exceeds "
            f"series of length {series.size}"
        )
    row = batch_interval_features(series[None, :], np.array([[interval.start, interval.length]]))
    return float(row[0, 0]), float(row[0, 1]), float(row[0, 2])


def _best_split(x: np.ndarray, y: np.ndarray, min_samples_leaf: int):
    """Exhaustive (feature, threshold) search minimizing weighted Gini.

    Candidates are midpoints between adjacent distinct sorted values, kept
    only when both sides hold >= min_samples_leaf samples. Returns None when
    no valid candidate exists.
    """
    n, n_features = x.shape
    order = np.argsort(x, axis=0, kind="stable")
    xs = np.take_along_axis(x, order, axis=0)
    ys = y[order].astype(np.float64)

    pos_cum = np.cumsum(ys, axis=0)
    total_pos = pos_cum[-1]

    nl = np.arange(1, n, dtype=np.float64)[:, None]
    nr = n - nl
    pl = pos_cum[:-1]
    pr = total_pos - pl

    gini_l = 1.0 - (pl / nl) ** 2 - ((nl - pl) / nl) ** 2
    gini_r = 1.0 - (pr / nr) ** 2 - ((nr - pr) / nr) ** 2
    score = (nl * gini_l + nr * gini_r) / n

    thresholds = (xs[:-1] + xs[1:]) / 2.0
    valid = (xs[:-1] < xs[1:]) & (thresholds < xs[1:])
    if min_samples_leaf > 1:
        counts_ok = (nl >= min_samples_leaf) & (nr >= min_samples_leaf)
        valid &= counts_ok
    score = np.where(valid, score, np.inf)

    # transpose so C-order argmin breaks ties by lowest feature, then lowest
    # threshold (positions ascend with sorted values)
    flat = np.ascontiguousarray(score.T).ravel()
    idx = int(np.argmin(flat))
    if not np.isfinite(flat[idx]):
        return None
    feature_idx, position = divmod(idx, n - 1)
    return feature_idx, float(thresholds[position, feature_idx])


def _fit_tree(x: np.ndarray, y: np.ndarray, params: ForestParams) -> dict:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    n_pos: list[int] = []
    n_neg: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        n_pos.append(0)
        n_neg.append(0)
        return len(feature) - 1

    root = new_node()
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.arange(x.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yn = y[idx]
        pos = int(yn.sum())
        n_pos[node] = pos
        n_neg[node] = idx.size - pos
        if pos == 0 or pos == idx.size:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue
        if idx.size < 2 * params.min_samples_leaf:
            continue
        split = _best_split(x[idx], yn, params.min_samples_leaf)
        if split is None:
            continue
        f, t = split
        feature[node] = f
        threshold[node] = t
        go_left = x[idx, f] <= t
        left_id = new_node()
        right_id = new_node()
        left[node] = left_id
        right[node] = right_id
        stack.append((right_id, idx[~go_left], depth + 1))
        stack.append((left_id, idx[go_left], depth + 1))

    return {
        "feature": np.array(feature, dtype=np.int32),
        "threshold": np.array(threshold, dtype=np.float64),
        "left": np.array(left, dtype=np.int32),
        "right": np.array(right, dtype=np.int32),
        "n_pos": np.array(n_pos, dtype=np.uint32),
        "n_neg": np.array(n_neg, dtype=np.uint32),
    }


def _draw_intervals(rng: np.random.Generator, k: int, series_len: int, min_len: int) -> np.ndarray:
    lengths = rng.integers(min_len, series_len + 1, size=k)
    starts = rng.integers(0, series_len - lengths + 1)
    return np.column_stack([starts, lengths]).astype(np.int64)


def train(feature_set: FeatureWindowSet, params: ForestParams, modality: str = "ecog") -> ForestModel:
    """Fit a forest on a feature-window set. Deterministic for a given seed:
    tree i draws from default_rng([seed, i]) regardless of evaluation order."""
    x_all = feature_set.features
    y = feature_set.labels.astype(np.uint8)
    series_len = feature_set.series_len
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.size:
        raise NoPositiveClassError(
            f"training needs both classes, got {n_pos} positive of {y.size} windows"
        )
    if series_len < params.min_interval_len:
        raise IntervalBoundsError(
            f"series length {series_len} shorter than min_interval_len {params.min_interval_len}"
        )

    k = params.resolved_intervals(series_len)
    prefixes = _prefix_sums(x_all)

    trees: list[Tree] = []
    for tree_idx in range(params.n_trees):
        rng = np.random.default_rng([params.seed, tree_idx])
        intervals = _draw_intervals(rng, k, series_len, params.min_interval_len)
        x = _features_from_prefix(prefixes, intervals)
        arrays = _fit_tree(x, y, params)
        trees.append(Tree(intervals=intervals, **arrays))

    return ForestModel(
        trees=trees,
        params=params,
        feature_len=series_len,
        modality=modality,
        feature_kind="fft" if feature_set.bin_hz > 0 else "raw",
        window_s=feature_set.window_s,
        stride_s=feature_set.stride_s,
        log_magnitude=feature_set.log_magnitude,
    )


def _route_leaf_fraction(tree: Tree, x: np.ndarray) -> np.ndarray:
    """Leaf positive fraction for every row of a per-tree feature matrix."""
    node = np.zeros(x.shape[0], dtype=np.int64)
    active = tree.feature[node] >= 0
    while active.any():
        rows = np.flatnonzero(active)
        curr = node[rows]
        f = tree.feature[curr]
        t = tree.threshold[curr]
        go_left = x[rows, f] <= t
        node[rows] = np.where(go_left, tree.left[curr], tree.right[curr])
        active = tree.feature[node] >= 0
    pos = tree.n_pos[node].astype(np.float64)
    neg = tree.n_neg[node].astype(np.float64)
    return pos / (pos + neg)


def predict_batch(model: ForestModel, features: np.ndarray) -> np.ndarray:
    """Probability per feature row: average over trees of leaf positive fractions."""
    features = np.atleast_2d(features)
    if features.shape[1] != model.feature_len:
        raise FeatureShapeError(
            f"feature rows have length {features.shape[1]}, model expects {model.feature_len}"
        )
    n = features.shape[0]
    out = np.zeros(n, dtype=np.float64)
    for lo in range(0, n, _PREDICT_CHUNK_ROWS):
        hi = min(lo + _PREDICT_CHUNK_ROWS, n)
        prefixes = _prefix_sums(features[lo:hi])
        votes = np.zeros(hi - lo, dtype=np.float64)
        for tree in model.trees:
            x = _features_from_prefix(prefixes, tree.intervals)
            votes += _route_leaf_fraction(tree, x)
        out[lo:hi] = votes / model.n_trees
    return out


def predict(model: ForestModel, features: np.ndarray) -> float:
    """Probability in [0, 1] that one feature row is a seizure window."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 1:
        raise DataError("predict takes a single 1-d feature row")
    return float(predict_batch(model, features[None, :])[0])


def predict_stream(model: ForestModel, feature_set: FeatureWindowSet) -> PredictionStream:
    """Map predict over all rows, keyed by window start times."""
    probs = predict_batch(model, feature_set.features)
    return PredictionStream(
        modality=model.modality,
        timestamps=np.asarray(feature_set.start_times, dtype=np.int64),
        probabilities=probs,
    )


def _header_dict(model: ForestModel) -> dict:
    p = model.params
    return {
        "feature_kind": model.feature_kind,
        "feature_len": model.feature_len,
        "intervals_per_tree": p.intervals_per_tree,
        "log_magnitude": model.log_magnitude,
        "max_depth": p.max_depth,
        "min_interval_len": p.min_interval_len,
        "min_samples_leaf": p.min_samples_leaf,
        "modality": model.modality,
        "n_trees": p.n_trees,
        "seed": p.seed,
        "stride_s": model.stride_s,
        "tag": model.tag,
        "window_s": model.window_s,
    }


def save_model(model: ForestModel, path) -> None:
    from pathlib import Path

    header = json.dumps(_header_dict(model), sort_keys=True, separators=(",", ":")).encode("ascii")
    blob = bytearray()
    blob += MODEL_MAGIC
    blob += np.uint32(MODEL_VERSION).tobytes()
    blob += np.uint32(len(header)).tobytes()
    blob += header
    for tree in model.trees:
        blob += np.uint32(tree.intervals.shape[0]).tobytes()
        blob += tree.intervals.astype("<u4").tobytes()
        blob += np.uint32(tree.n_nodes).tobytes()
        blob += tree.feature.astype("<i4").tobytes()
        blob += tree.threshold.astype("<f8").tobytes()
        blob += tree.left.astype("<i4").tobytes()
        blob += tree.right.astype("<i4").tobytes()
        blob += tree.n_pos.astype("<u4").tobytes()
        blob += tree.n_neg.astype("<u4").tobytes()
    blob += hashlib.sha256(bytes(blob)).digest()
    Path(path).write_bytes(bytes(blob))


class _Cursor:
    def __init__(self, raw: bytes):
        self.raw = raw
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.raw):
            raise ModelIntegrityError("model file truncated")
        out = self.raw[self.pos : self.pos + count]
        self.pos += count
        return out

    def array(self, dtype: str, count: int) -> np.ndarray:
        item = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(count * item), dtype=dtype).copy()

    def u32(self) -> int:
        return int(self.array("<u4", 1)[0])


def load_model(path) -> ForestModel:
    from pathlib import Path

    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    if len(raw) < 44 or raw[:4] != MODEL_MAGIC:
        raise ModelIntegrityError(f"{path}: not a forest model file")
    digest = raw[-32:]
    if hashlib.sha256(raw[:-32]).digest() != digest:
        raise ModelIntegrityError(f"{path}: checksum mismatch (corrupted or truncated)")

    cur = _Cursor(raw[:-32])
    cur.take(4)
    version = cur.u32()
    if version != MODEL_VERSION:
        raise ModelVersionError(
            f"{path}: model format version {version}, this build reads {MODEL_VERSION}"
        )
    header = json.loads(cur.take(cur.u32()).decode("ascii"))

    params = ForestParams(
        n_trees=header["n_trees"],
        intervals_per_tree=header["intervals_per_tree"],
        min_interval_len=header["min_interval_len"],
        max_depth=header["max_depth"],
        min_samples_leaf=header["min_samples_leaf"],
        seed=header["seed"],
    )
    trees = []
    for _ in range(params.n_trees):
        n_intervals = cur.u32()
        intervals = cur.array("<u4", n_intervals * 2).astype(np.int64).reshape(n_intervals, 2)
        n_nodes = cur.u32()
        trees.append(
            Tree(
                intervals=intervals,
                feature=cur.array("<i4", n_nodes),
                threshold=cur.array("<f8", n_nodes),
                left=cur.array("<i4", n_nodes),
                right=cur.array("<i4", n_nodes),
                n_pos=cur.array("<u4", n_nodes),
                n_neg=cur.array("<u4", n_nodes),
            )
        )
    if cur.pos != len(cur.raw):
        raise ModelIntegrityError(f"{path}: {len(cur.raw) - cur.pos} unexpected trailing bytes")

    return ForestModel(
        trees=trees,
        params=params,
        feature_len=header["feature_len"],
        modality=header["modality"],
        feature_kind=header["feature_kind"],
        window_s=header["window_s"],
        stride_s=header["stride_s"],
        log_magnitude=header["log_magnitude"],
        tag=header["tag"],
    )
