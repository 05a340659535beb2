"""Framewise classification metrics and event-overlap metrics.

AUC is rank-based (Mann-Whitney with average ranks for ties) and therefore
threshold-independent; auc_check recomputes it by trapezoidal integration
of the ROC curve as a cross-check. Event metrics count a true event as
detected when any predicted event interval intersects it, and a predicted
event as a false positive when it intersects no true event.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DataError, SingleClassError
from .types import SeizureAnnotation, SeizureEvent


@dataclass(frozen=True)
class FrameMetrics:
    accuracy: float
    precision: float
    recall: float
    auc: float | None  # None when labels are single-class (AUC undefined)
    tp: int
    fp: int
    tn: int
    fn: int
    degenerate_precision: bool = False  # no positive predictions: 0/0 reported as 0
    degenerate_recall: bool = False  # no positive labels: 0/0 reported as 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class EventMetrics:
    n_true_events: int
    n_detected: int
    n_false_positive_events: int

    def __post_init__(self):
        if not 0 <= self.n_detected <= self.n_true_events:
            raise DataError(f"invalid event counts: {self}")


def rank_auc(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC with average ranks for tied scores."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError(
            f"AUC undefined with {n_pos} positive / {n_neg} negative labels"
        )
    ranks = rankdata(probs, method="average")
    pos_rank_sum = float(np.sum(ranks[labels == 1]))
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def frame_metrics(probs: np.ndarray, labels: np.ndarray, threshold: float = 0.5) -> FrameMetrics:
    """Confusion counts and derived metrics at a threshold (pred = prob >= threshold).

    0/0 precision or recall is reported as 0.0 with the matching degenerate
    flag set. AUC is None (not an exception) when labels are single-class,
    so the remaining metrics are still returned.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.shape != labels.shape or probs.ndim != 1 or probs.size == 0:
        raise DataError("probs and labels must be equal-length non-empty 1-d arrays")
    if not np.all((labels == 0) | (labels == 1)):
        raise DataError("labels must be binary 0/1")
    if not 0.0 <= threshold <= 1.0:
        raise DataError(f"threshold {threshold} outside [0, 1]")

    preds = probs >= threshold
    pos = labels == 1
    tp = int(np.sum(preds & pos))
    fp = int(np.sum(preds & ~pos))
    fn = int(np.sum(~preds & pos))
    tn = int(np.sum(~preds & ~pos))

    degenerate_precision = (tp + fp) == 0
    degenerate_recall = (tp + fn) == 0
    precision = 0.0 if degenerate_precision else tp / (tp + fp)
    recall = 0.0 if degenerate_recall else tp / (tp + fn)

    try:
        auc = rank_auc(probs, labels)
    except SingleClassError:
        auc = None

    return FrameMetrics(
        accuracy=(tp + tn) / probs.size,
        precision=precision,
        recall=recall,
        auc=auc,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        degenerate_precision=degenerate_precision,
        degenerate_recall=degenerate_recall,
    )


def auc_check(probs: np.ndarray, labels: np.ndarray) -> float:
    """AUC by trapezoidal integration of the ROC curve over all distinct
    score thresholds; must equal rank_auc up to float rounding."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError(
            f"AUC undefined with {n_pos} positive / {n_neg} negative labels"
        )

    order = np.argsort(-probs, kind="stable")
    sorted_labels = labels[order]
    sorted_probs = probs[order]
    # cut after each block of tied scores
    block_end = np.flatnonzero(np.diff(sorted_probs) != 0)
    cuts = np.concatenate([block_end, [probs.size - 1]])

    tp_cum = np.cumsum(sorted_labels == 1)[cuts]
    fp_cum = np.cumsum(sorted_labels == 0)[cuts]
    tpr = np.concatenate([[0.0], tp_cum / n_pos])
    fpr = np.concatenate([[0.0], fp_cum / n_neg])
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def _check_sorted(starts: np.ndarray, what: str) -> None:
    if np.any(np.diff(starts) < 0):
        raise DataError(f"{what} not sorted by start time")


def event_metrics(
    predicted: list[SeizureEvent],
    truth: list[SeizureAnnotation],
) -> EventMetrics:
    """Overlap-based event counts.

    Both lists must be sorted by start; true events must not overlap each
    other. Predicted events may overlap (two positive runs separated by one
    grid gap produce overlapping union-of-window extents). Any non-empty
    intersection of half-open intervals counts: one predicted event spanning
    two true events detects both, and a predicted event touching at least
    one true event is not a false positive.
    """
    p_start = np.array([e.start_unix for e in predicted], dtype=np.int64)
    p_end = np.array([e.end_unix for e in predicted], dtype=np.int64)
    t_start = np.array([a.start_unix for a in truth], dtype=np.int64)
    t_end = np.array([a.end_unix for a in truth], dtype=np.int64)
    _check_sorted(p_start, "predicted events")
    _check_sorted(t_start, "true events")
    if np.any(t_start[1:] < t_end[:-1]):
        raise DataError("true events overlap each other")

    # truth i is detected iff some predicted event has start < t_end[i] and
    # end > t_start[i]; with predictions sorted by start, that is a prefix
    # query answered by the running maximum of prediction ends
    if p_start.size:
        p_end_runmax = np.maximum.accumulate(p_end)
        k = np.searchsorted(p_start, t_end, side="left")
        detected = int(np.sum((k > 0) & (p_end_runmax[np.maximum(k - 1, 0)] > t_start)))
    else:
        detected = 0

    if t_start.size and p_start.size:
        t_end_runmax = np.maximum.accumulate(t_end)  # truths disjoint, still safe
        k = np.searchsorted(t_start, p_end, side="left")
        hit = (k > 0) & (t_end_runmax[np.maximum(k - 1, 0)] > p_start)
        false_pos = int(np.sum(~hit))
    else:
        false_pos = int(p_start.size)

    return EventMetrics(
        n_true_events=int(t_start.size),
        n_detected=detected,
        n_false_positive_events=false_pos,
    )
