"""Performance limits of any classifier on an aggregated dataset.

A deterministic classifier over categorical features can only assign one class
per bucket, so it is fully described by a 0/1 prediction vector ``p`` with one
entry per bucket. This module evaluates such vectors, finds the accuracy range
over all of them, and builds the ROC curve with the largest attainable AUC.

Curves are built by "flipping" entries of the all-ones vector to zero one at a
time. Flipping bucket ``j`` moves the operating point down-left by
``(m0[j] / M0, m1[j] / M1)``. Flipping in ascending order of ``m1/m0`` gives a
concave curve, which is the one with maximal area.

Ratios are kept as integers (or ``Fraction``) until the reporting boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .bucketizer import AggregatedDataset, classify_buckets
from .errors import DegenerateClassError, UndefinedMetricError


class RocPoint(NamedTuple):
    fpr: float
    tpr: float


@dataclass(frozen=True)
class ConfusionCounts:
    TP: int
    TN: int
    FP: int
    FN: int

    @property
    def M(self) -> int:
        return self.TP + self.TN + self.FP + self.FN

    @property
    def tpr(self) -> float:
        return self.TP / (self.TP + self.FN)

    @property
    def tnr(self) -> float:
        return self.TN / (self.TN + self.FP)

    @property
    def fpr(self) -> float:
        return self.FP / (self.TN + self.FP)

    @property
    def accuracy(self) -> float:
        return (self.TP + self.TN) / self.M


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Piecewise-linear ROC curve stored from (0, 0) to (1, 1).

    ``flip_order`` lists bucket indices in the order they were flipped starting
    from the all-ones prediction, i.e. walking the curve from (1, 1) down.
    It is empty for curves built from scores.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    auc: float
    flip_order: tuple[int, ...] = ()
    auc_exact: Fraction | None = None

    @property
    def points(self) -> list[RocPoint]:
        return [RocPoint(float(x), float(y)) for x, y in zip(self.fpr, self.tpr)]

    def __len__(self) -> int:
        return len(self.fpr)

    def slopes(self) -> list[float]:
        """Segment slopes in ascending-FPR order (``inf`` for vertical segments)."""
        dx = np.diff(self.fpr)
        dy = np.diff(self.tpr)
        with np.errstate(divide="ignore", invalid="ignore"):
            return [float(s) for s in np.where(dx > 0, dy / np.where(dx > 0, dx, 1), np.inf)]

    def to_json_dict(self) -> dict:
        return {
            "auc": self.auc,
            "flip_order": list(self.flip_order),
            "points": [[float(x), float(y)] for x, y in zip(self.fpr, self.tpr)],
        }


@dataclass(frozen=True)
class LimitReport:
    max_auc: float | None
    max_accuracy: float
    min_accuracy: float
    perfection_index: float
    n_buckets: int
    n_perfect_buckets: int
    is_perfect: bool

    def to_json_dict(self) -> dict:
        return {
            "max_auc": self.max_auc,
            "max_accuracy": self.max_accuracy,
            "min_accuracy": self.min_accuracy,
            "perfection_index": self.perfection_index,
            "n_buckets": self.n_buckets,
            "n_perfect_buckets": self.n_perfect_buckets,
            "is_perfect": self.is_perfect,
        }


def _as_prediction(B: AggregatedDataset, p) -> np.ndarray:
    p = np.asarray(p)
    if p.shape != (B.n_buckets,):
        raise ValueError(f"prediction vector has length {p.size}, dataset has {B.n_buckets} buckets")
    if not np.isin(p, (0, 1)).all():
        raise ValueError("prediction vector entries must be 0 or 1")
    return p.astype(np.int64)


def _require_nonempty(B: AggregatedDataset) -> None:
    if B.M == 0:
        raise UndefinedMetricError("metric undefined on an empty dataset")


def _require_both_classes(B: AggregatedDataset) -> None:
    if B.M1 == 0 or B.M0 == 0:
        raise DegenerateClassError("ROC undefined: dataset contains a single class")


def confusion(B: AggregatedDataset, p) -> ConfusionCounts:
    p = _as_prediction(B, p)
    tp = int(B.m1 @ p)
    fp = int(B.m0 @ p)
    return ConfusionCounts(TP=tp, TN=B.M0 - fp, FP=fp, FN=B.M1 - tp)


def accuracy_exact(B: AggregatedDataset, p) -> Fraction:
    _require_nonempty(B)
    p = _as_prediction(B, p)
    return Fraction(int(p @ (B.m1 - B.m0)) + B.M0, B.M)


def accuracy(B: AggregatedDataset, p) -> float:
    return float(accuracy_exact(B, p))


def max_accuracy(B: AggregatedDataset) -> tuple[float, np.ndarray]:
    """Best accuracy over all prediction vectors, and a vector attaining it.

    Predicts 1 exactly where class 1 is the strict majority; ties predict 0.
    """
    _require_nonempty(B)
    p = (B.m1 > B.m0).astype(np.int64)
    return int(np.maximum(B.m0, B.m1).sum()) / B.M, p


def worst_prediction(B: AggregatedDataset) -> np.ndarray:
    """A prediction vector attaining the minimum accuracy."""
    return (B.m1 < B.m0).astype(np.int64)


def min_accuracy(B: AggregatedDataset) -> float:
    _require_nonempty(B)
    return int(np.minimum(B.m0, B.m1).sum()) / B.M


def perfection_index(B: AggregatedDataset) -> float:
    _require_nonempty(B)
    return int(np.abs(B.m1 - B.m0).sum()) / B.M


def flip_effect(B: AggregatedDataset, j: int) -> tuple[float, float]:
    """Drop in (TPR, FPR) caused by flipping bucket ``j`` from 1 to 0."""
    _require_both_classes(B)
    return int(B.m1[j]) / B.M1, int(B.m0[j]) / B.M0


def prediction_point(B: AggregatedDataset, p) -> RocPoint:
    _require_both_classes(B)
    c = confusion(B, p)
    return RocPoint(c.fpr, c.tpr)


def slope_order(B: AggregatedDataset) -> list[int]:
    """Bucket indices by ascending ``m1/m0``; ``m0 == 0`` last; ties by index."""
    m0 = B.m0.tolist()
    m1 = B.m1.tolist()

    def key(j):
        if m0[j] == 0:
            return (1, Fraction(0), j)
        return (0, Fraction(m1[j], m0[j]), j)

    return sorted(range(B.n_buckets), key=key)


def _exact_area(fp: Sequence[int], tp: Sequence[int], M0: int, M1: int) -> Fraction:
    twice = 0
    for k in range(len(fp) - 1):
        twice += (fp[k + 1] - fp[k]) * (tp[k] + tp[k + 1])
    return Fraction(twice, 2 * M0 * M1)


def curve_from_order(B: AggregatedDataset, order: Sequence[int]) -> RocCurve:
    """ROC curve traced by flipping buckets of the all-ones vector in ``order``."""
    _require_both_classes(B)
    order = [int(j) for j in order]
    if sorted(order) != list(range(B.n_buckets)):
        raise ValueError("flip order must be a permutation of the bucket indices")
    # The last flip is the first segment out of (0, 0).
    rev = order[::-1]
    fp = [0]
    tp = [0]
    m0 = B.m0.tolist()
    m1 = B.m1.tolist()
    for j in rev:
        fp.append(fp[-1] + m0[j])
        tp.append(tp[-1] + m1[j])
    area = _exact_area(fp, tp, B.M0, B.M1)
    return RocCurve(
        fpr=np.array(fp, dtype=float) / B.M0,
        tpr=np.array(tp, dtype=float) / B.M1,
        auc=float(area),
        flip_order=tuple(order),
        auc_exact=area,
    )


def ild_curve(B: AggregatedDataset) -> RocCurve:
    """The ROC curve with maximal AUC over all flip orders."""
    return curve_from_order(B, slope_order(B))


def _turn(m0: list[int], m1: list[int], a: int, b: int) -> int:
    # Sign of the cross product of the segment directions of flip a then flip b.
    # Negative: the two segments bend the curve inward (angle below pi) and the
    # pair must be swapped.
    return m0[a] * m1[b] - m1[a] * m0[b]


def bubble_order(B: AggregatedDataset, order: Sequence[int]) -> tuple[list[int], int]:
    """Swap adjacent flips while any pair bends inward. Returns (order, swaps)."""
    order = [int(j) for j in order]
    m0 = B.m0.tolist()
    m1 = B.m1.tolist()
    swaps = 0
    while True:
        c = 0
        for i in range(len(order) - 1):
            if _turn(m0, m1, order[i], order[i + 1]) < 0:
                order[i], order[i + 1] = order[i + 1], order[i]
                c += 1
        swaps += c
        if c == 0:
            return order, swaps


def ild_curve_bubble(
    B: AggregatedDataset, seed: int | None = None, initial_order: Sequence[int] | None = None
) -> RocCurve:
    """Maximal-AUC curve by adjacent swaps, starting from a random flip order.

    O(N_B^2); kept as an independent construction to check ``ild_curve``.
    """
    _require_both_classes(B)
    if initial_order is None:
        initial_order = np.random.default_rng(seed).permutation(B.n_buckets).tolist()
    order, _ = bubble_order(B, initial_order)
    return curve_from_order(B, order)


def roc_of_random_flips(B: AggregatedDataset, seed: int | None = None) -> RocCurve:
    _require_both_classes(B)
    return curve_from_order(B, np.random.default_rng(seed).permutation(B.n_buckets).tolist())


def auc(points: Sequence[tuple[float, float]]) -> float:
    """Trapezoidal area under a piecewise-linear ROC curve."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    x, y = pts[:, 0], pts[:, 1]
    if (pts < 0).any() or (pts > 1).any():
        raise ValueError("ROC coordinates must lie in [0, 1]")
    if (np.diff(x) < 0).any():
        raise ValueError("points must be sorted by nondecreasing FPR")
    if tuple(pts[0]) != (0.0, 0.0) or tuple(pts[-1]) != (1.0, 1.0):
        raise ValueError("curve must start at (0, 0) and end at (1, 1)")
    return float(np.sum(np.diff(x) * (y[:-1] + y[1:]) / 2.0))


def roc_from_scores(scores, labels) -> RocCurve:
    """Threshold-sweep ROC: one cut between each pair of distinct scores.

    Scores only need to be orderable; equal scores are swept together, giving a
    diagonal segment for tied positives and negatives.
    """
    scores = np.asarray(scores)
    labels = np.asarray(labels, dtype=np.int64)
    P = int(labels.sum())
    N = int(labels.size - P)
    if P == 0 or N == 0:
        raise DegenerateClassError("ROC undefined: evaluation set contains a single class")
    uniq, inverse = np.unique(scores, return_inverse=True)
    inverse = inverse.reshape(-1)
    pos = np.bincount(inverse[labels == 1], minlength=len(uniq))[::-1]
    neg = np.bincount(inverse[labels == 0], minlength=len(uniq))[::-1]
    tp = [0] + np.cumsum(pos).tolist()
    fp = [0] + np.cumsum(neg).tolist()
    area = _exact_area(fp, tp, N, P)
    return RocCurve(
        fpr=np.array(fp, dtype=float) / N,
        tpr=np.array(tp, dtype=float) / P,
        auc=float(area),
        auc_exact=area,
    )


def curve_height(curve: RocCurve, x: float) -> float:
    """Largest TPR the curve reaches at FPR ``x``."""
    fpr, tpr = curve.fpr, curve.tpr
    at = fpr == x
    best = float(tpr[at].max()) if at.any() else -np.inf
    k = int(np.searchsorted(fpr, x, side="right"))
    if 0 < k < len(fpr) and fpr[k - 1] < x < fpr[k]:
        t = (x - fpr[k - 1]) / (fpr[k] - fpr[k - 1])
        best = max(best, float(tpr[k - 1] + t * (tpr[k] - tpr[k - 1])))
    return best


def limit_report(B: AggregatedDataset) -> LimitReport:
    _require_nonempty(B)
    part = classify_buckets(B)
    try:
        max_auc = ild_curve(B).auc
    except DegenerateClassError:
        max_auc = None
    return LimitReport(
        max_auc=max_auc,
        max_accuracy=max_accuracy(B)[0],
        min_accuracy=min_accuracy(B),
        perfection_index=perfection_index(B),
        n_buckets=B.n_buckets,
        n_perfect_buckets=int(part.perfect.size),
        is_perfect=part.is_perfect,
    )
