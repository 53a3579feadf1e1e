"""Seeded train/validation study: ILD ceiling against naive Bayes.

Randomness comes from numpy's PCG64 bit generator seeded with the integer
trial seed (``numpy.random.Generator(PCG64(seed))``). PCG64's output stream
is fixed by its published algorithm, so splits reproduce across platforms.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import nb
from .bucketizer import aggregate
from .core import RocCurve, ild_curve, max_accuracy, roc_from_scores
from .dataio import FeatureSchema, ObservationTable
from .errors import DegenerateClassError

log = logging.getLogger(__name__)

# "transfer": rank validation rows by train-bucket ratios (out-of-sample).
# "ceiling": maximal AUC of the validation buckets themselves (in-sample limit).
ILD_MODES = ("transfer", "ceiling")

RESULT_COLUMNS = (
    "seed",
    "auc_ild",
    "auc_nb",
    "auc_diff",
    "acc_ild",
    "acc_nb",
    "n_buckets_train",
    "n_unseen_buckets_valid",
)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class TrialResult:
    seed: int
    auc_ild: float | None
    auc_nb: float | None
    auc_diff: float | None
    acc_ild: float
    acc_nb: float
    n_buckets_train: int
    n_unseen_buckets_valid: int
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def row(self) -> list[str]:
        def fmt(v):
            return "" if v is None else repr(v)

        return [fmt(getattr(self, c)) for c in RESULT_COLUMNS]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split(table: ObservationTable, spec: SplitSpec) -> tuple[ObservationTable, ObservationTable]:
    """Random partition into ``round(f * M)`` training rows and the rest.

    Row order inside each side follows the original table.
    """
    M = table.M
    if M < 2:
        raise ValueError("need at least two rows to split")
    n_train = _round_half_up(spec.train_fraction * M)
    rng = _rng(spec.seed)
    if spec.stratified:
        pos = np.flatnonzero(table.labels == 1)
        neg = np.flatnonzero(table.labels == 0)
        n_pos = min(_round_half_up(spec.train_fraction * len(pos)), n_train)
        n_neg = n_train - n_pos
        train_idx = np.concatenate([rng.permutation(pos)[:n_pos], rng.permutation(neg)[:n_neg]])
    else:
        train_idx = rng.permutation(M)[:n_train]
    mask = np.zeros(M, dtype=bool)
    mask[train_idx] = True
    return table.take(np.flatnonzero(mask)), table.take(np.flatnonzero(~mask))


def _slope_key(m0: int, m1: int) -> tuple[int, Fraction]:
    return (1, Fraction(0)) if m0 == 0 else (0, Fraction(m1, m0))


def ild_scores(train: ObservationTable, valid: ObservationTable) -> tuple[np.ndarray, int]:
    """Integer rank of each validation row's train-bucket ``m1/m0`` ratio.

    Rows whose bucket never appears in ``train`` get the overall training
    ratio ``M1/M0``. Also returns the number of such unseen buckets.
    """
    B = aggregate(train)
    lookup = {
        k: _slope_key(a, b)
        for k, a, b in zip(map(tuple, B.keys.tolist()), B.m0.tolist(), B.m1.tolist())
    }
    fallback = _slope_key(B.M0, B.M1)
    keys = list(map(tuple, valid.codes.tolist()))
    slopes = [lookup.get(k, fallback) for k in keys]
    unseen = {k for k in keys if k not in lookup}
    rank = {s: r for r, s in enumerate(sorted(set(slopes)))}
    return np.array([rank[s] for s in slopes], dtype=np.int64), len(unseen)


def evaluate_ild_on_validation(train: ObservationTable, valid: ObservationTable) -> RocCurve:
    """ROC on ``valid`` when rows are ranked by bucket ratios learned on ``train``."""
    scores, _ = ild_scores(train, valid)
    return roc_from_scores(scores, valid.labels)


def run_trial(
    table: ObservationTable,
    seed: int,
    train_fraction: float = 0.8,
    alpha: float = 1.0,
    stratified: bool = False,
    schema: FeatureSchema | None = None,
    ild_mode: str = "transfer",
) -> TrialResult:
    if ild_mode not in ILD_MODES:
        raise ValueError(f"ild_mode must be one of {ILD_MODES}")
    train, valid = split(table, SplitSpec(train_fraction, seed, stratified))
    notes = []
    for name, side in (("train", train), ("valid", valid)):
        if side.labels.min() == side.labels.max():
            notes.append(f"seed {seed}: {name} split contains a single class")

    scores, n_unseen = ild_scores(train, valid)
    model = nb.fit(train, schema or table.schema, alpha=alpha)
    try:
        if ild_mode == "ceiling":
            auc_ild = ild_curve(aggregate(valid)).auc
        else:
            auc_ild = roc_from_scores(scores, valid.labels).auc
        auc_nb = nb.nb_roc(model, valid).auc
    except DegenerateClassError:
        auc_ild = auc_nb = None
    for msg in notes:
        log.warning(msg)

    return TrialResult(
        seed=seed,
        auc_ild=auc_ild,
        auc_nb=auc_nb,
        auc_diff=None if auc_ild is None else auc_ild - auc_nb,
        acc_ild=max_accuracy(aggregate(valid))[0],
        acc_nb=nb.accuracy_at(model, valid, nb.best_threshold(model, train)),
        n_buckets_train=aggregate(train).n_buckets,
        n_unseen_buckets_valid=n_unseen,
        warnings=tuple(notes),
    )


def run_trials(
    table: ObservationTable,
    n: int,
    base_seed: int = 0,
    train_fraction: float = 0.8,
    alpha: float = 1.0,
    stratified: bool = False,
    schema: FeatureSchema | None = None,
    ild_mode: str = "transfer",
) -> list[TrialResult]:
    """Trial ``i`` uses seed ``base_seed + i``; results come back in seed order."""
    if n < 1:
        raise ValueError("need at least one trial")
    return [
        run_trial(table, base_seed + i, train_fraction, alpha, stratified, schema, ild_mode)
        for i in range(n)
    ]


def write_results_csv(results: list[TrialResult], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in results:
            w.writerow(r.row())


def summarize(results: list[TrialResult]) -> dict:
    def stats(values):
        v = [x for x in values if x is not None]
        if not v:
            return {"mean": None, "min": None, "max": None}
        return {"mean": float(np.mean(v)), "min": float(min(v)), "max": float(max(v))}

    return {
        "n_trials": len(results),
        "auc_ild": stats([r.auc_ild for r in results]),
        "auc_nb": stats([r.auc_nb for r in results]),
        "auc_diff": stats([r.auc_diff for r in results]),
        "acc_ild": stats([r.acc_ild for r in results]),
        "acc_nb": stats([r.acc_nb for r in results]),
        "n_positive_diff": sum(1 for r in results if r.auc_diff is not None and r.auc_diff > 0),
    }
