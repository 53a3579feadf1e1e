"""Categorical naive Bayes, the comparison model for the ILD ceiling."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import RocCurve, roc_from_scores
from .dataio import FeatureSchema, ObservationTable


@dataclass(frozen=True, eq=False)
class NbModel:
    """Class-1 prior and per-feature tables ``cond[f][code, y] = P(F_f = code | y)``."""

    prior: float
    cond: tuple[np.ndarray, ...]
    alpha: float
    feature_names: tuple[str, ...] | None = None

    @property
    def n_features(self) -> int:
        return len(self.cond)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "prior": self.prior,
            "features": list(self.feature_names) if self.feature_names else None,
            "cond": [c.tolist() for c in self.cond],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "NbModel":
        return cls(
            prior=float(d["prior"]),
            cond=tuple(np.array(c, dtype=float).reshape(-1, 2) for c in d["cond"]),
            alpha=float(d["alpha"]),
            feature_names=tuple(d["features"]) if d.get("features") else None,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NbModel":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def permuted(self, perm) -> "NbModel":
        names = tuple(self.feature_names[i] for i in perm) if self.feature_names else None
        return NbModel(self.prior, tuple(self.cond[i] for i in perm), self.alpha, names)


def fit(
    train: ObservationTable,
    schema: FeatureSchema | None = None,
    alpha: float = 1.0,
    n_codes=None,
) -> NbModel:
    """Additive-smoothing estimates of the prior and conditional tables.

    The code space of each feature (sentinel included) comes from ``n_codes``,
    else the schema, else the largest observed code.
    """
    if train.M == 0:
        raise ValueError("cannot fit on an empty table")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    schema = schema or train.schema
    if n_codes is None:
        n_codes = schema.n_codes if schema is not None else train.codes.max(axis=0) + 1
    n_codes = [int(n) for n in n_codes]
    if train.has_missing():
        raise ValueError("impute missing values before fitting")

    y = train.labels
    class_counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=float)
    cond = []
    for f, n in enumerate(n_codes):
        counts = np.zeros((n, 2))
        np.add.at(counts, (train.codes[:, f], y), 1.0)
        denom = class_counts + alpha * n
        with np.errstate(invalid="ignore", divide="ignore"):
            table = (counts + alpha) / denom
        # Class absent with alpha = 0: no information, use uniform.
        table[:, denom == 0] = 1.0 / n
        cond.append(table)
    prior = (class_counts[1] + alpha) / (train.M + 2 * alpha)
    names = tuple(schema.names) if schema is not None else None
    return NbModel(prior=float(prior), cond=tuple(cond), alpha=float(alpha), feature_names=names)


def _log_joint(model: NbModel, codes: np.ndarray) -> np.ndarray:
    codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
    if codes.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {codes.shape[1]}")
    with np.errstate(divide="ignore"):
        out = np.tile(np.log([1.0 - model.prior, model.prior]), (codes.shape[0], 1))
        for f, table in enumerate(model.cond):
            col = codes[:, f]
            if (col < 0).any() or (col >= table.shape[0]).any():
                raise ValueError(f"code out of range for feature {f}")
            out += np.log(table[col])
    return out


def score_codes(model: NbModel, codes) -> np.ndarray:
    """Posterior P(y = 1 | x) for each row of ``codes``."""
    lj = _log_joint(model, codes)
    l0, l1 = lj[:, 0], lj[:, 1]
    both_dead = np.isneginf(l0) & np.isneginf(l1)
    with np.errstate(invalid="ignore"):
        post = np.exp(l1 - np.logaddexp(l0, l1))
    return np.where(both_dead, model.prior, post)


def score(model: NbModel, x) -> float:
    return float(score_codes(model, np.asarray(x).reshape(1, -1))[0])


def nb_roc(model: NbModel, eval_table: ObservationTable) -> RocCurve:
    return roc_from_scores(score_codes(model, eval_table.codes), eval_table.labels)


def best_threshold(model: NbModel, train: ObservationTable) -> float:
    """Observed score ``t`` maximizing training accuracy of ``score >= t``.

    Ties go to the smallest such ``t``.
    """
    s = score_codes(model, train.codes)
    y = train.labels
    uniq, inverse = np.unique(s, return_inverse=True)
    inverse = inverse.reshape(-1)
    pos = np.bincount(inverse[y == 1], minlength=len(uniq))
    neg = np.bincount(inverse[y == 0], minlength=len(uniq))
    # Threshold uniq[k]: positives at or above k are hits, negatives below k are hits.
    tp = pos[::-1].cumsum()[::-1]
    tn = np.concatenate([[0], neg.cumsum()[:-1]])
    correct = tp + tn
    return float(uniq[int(np.argmax(correct))])


def predict(model: NbModel, table: ObservationTable, threshold: float) -> np.ndarray:
    return (score_codes(model, table.codes) >= threshold).astype(np.int64)


def accuracy_at(model: NbModel, table: ObservationTable, threshold: float) -> float:
    return float(np.mean(predict(model, table, threshold) == table.labels))
