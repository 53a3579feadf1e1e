"""Brute-force reference computations, used only for verification.

None of these share code with the constructions in ``core``; they enumerate
or compare pairs directly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .bucketizer import AggregatedDataset


def exhaustive_max_auc(B: AggregatedDataset) -> Fraction:
    """Largest AUC over all ``N_B!`` flip orders, in exact arithmetic."""
    m0 = B.m0.tolist()
    m1 = B.m1.tolist()
    M0, M1 = sum(m0), sum(m1)
    best = None
    for perm in itertools.permutations(range(len(m0))):
        # Walk down from (M0, M1); area is accumulated as a sum of trapezoids.
        x, y, twice = M0, M1, 0
        for j in perm:
            nx, ny = x - m0[j], y - m1[j]
            twice += (x - nx) * (y + ny)
            x, y = nx, ny
        if best is None or twice > best:
            best = twice
    return Fraction(best, 2 * M0 * M1)


def exhaustive_accuracy_range(B: AggregatedDataset) -> tuple[Fraction, Fraction]:
    """(min, max) accuracy over all ``2**N_B`` prediction vectors."""
    m0 = B.m0.tolist()
    m1 = B.m1.tolist()
    M = sum(m0) + sum(m1)
    lo = hi = None
    for p in itertools.product((0, 1), repeat=len(m0)):
        correct = sum(b if pj else a for pj, a, b in zip(p, m0, m1))
        lo = correct if lo is None else min(lo, correct)
        hi = correct if hi is None else max(hi, correct)
    return Fraction(lo, M), Fraction(hi, M)


def pairwise_rank_auc(B: AggregatedDataset) -> float:
    """Mann-Whitney statistic with each observation scored by its bucket's m1/m0.

    Expands buckets to individual observations and compares every
    (positive, negative) pair; ties count one half.
    """
    with np.errstate(divide="ignore"):
        slope = np.where(B.m0 > 0, B.m1 / np.where(B.m0 > 0, B.m0, 1), np.inf)
    pos = np.repeat(slope, B.m1)
    neg = np.repeat(slope, B.m0)
    gt = (pos[:, None] > neg[None, :]).sum(dtype=np.int64)
    eq = (pos[:, None] == neg[None, :]).sum(dtype=np.int64)
    return (float(gt) + 0.5 * float(eq)) / (len(pos) * len(neg))


def exhaustive_best_threshold(scores, labels) -> tuple[float, float]:
    """Best (threshold, accuracy) over every observed score, predicting ``score >= t``."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    best_t, best_acc = None, -1.0
    for t in sorted(set(scores.tolist())):
        acc = float(np.mean((scores >= t).astype(int) == labels))
        if acc > best_acc:
            best_t, best_acc = t, acc
    return best_t, best_acc
