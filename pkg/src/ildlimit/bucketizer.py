"""Aggregation of an encoded table into feature buckets with class counts."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .dataio import MISSING, FeatureSchema, ObservationTable
from .errors import DataError


class Bucket(NamedTuple):
    key: tuple[int, ...]
    m0: int
    m1: int

    @property
    def size(self) -> int:
        return self.m0 + self.m1


@dataclass(frozen=True, eq=False)
class AggregatedDataset:
    """Realized feature combinations (rows of ``keys``) with class-0/1 counts.

    Keys are unique and sorted lexicographically. Combinations that never occur
    are not stored; they carry zero weight in every formula.
    """

    keys: np.ndarray
    m0: np.ndarray
    m1: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        keys = np.array(self.keys, dtype=np.int64, copy=True)
        m0 = np.array(self.m0, dtype=np.int64, copy=True).reshape(-1)
        m1 = np.array(self.m1, dtype=np.int64, copy=True).reshape(-1)
        if keys.ndim == 1:
            keys = keys.reshape(len(m0), -1)
        if not (keys.shape[0] == m0.shape[0] == m1.shape[0]):
            raise DataError("keys, m0 and m1 must have the same length")
        if (m0 < 0).any() or (m1 < 0).any():
            raise DataError("bucket counts must be nonnegative")
        if ((m0 + m1) < 1).any():
            raise DataError("empty buckets are not allowed")
        if keys.shape[0] > 1:
            order = np.lexsort(keys.T[::-1])
            if not np.array_equal(order, np.arange(keys.shape[0])):
                keys, m0, m1 = keys[order], m0[order], m1[order]
            if (np.diff(keys, axis=0) == 0).all(axis=1).any():
                raise DataError("bucket keys must be distinct")
        if self.feature_names is not None and len(self.feature_names) != keys.shape[1]:
            raise DataError("feature_names length does not match key width")
        for a in (keys, m0, m1):
            a.flags.writeable = False
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "m1", m1)

    @classmethod
    def from_counts(cls, counts: Sequence[tuple[int, int]], keys=None) -> "AggregatedDataset":
        """Build from ``[(m0, m1), ...]``; default keys are ``(0,), (1,), ...``."""
        counts = np.asarray(counts, dtype=np.int64).reshape(-1, 2)
        if keys is None:
            keys = np.arange(len(counts), dtype=np.int64).reshape(-1, 1)
        return cls(keys, counts[:, 0], counts[:, 1])

    @property
    def n_buckets(self) -> int:
        return int(self.m0.shape[0])

    N_B = n_buckets

    @property
    def n_features(self) -> int:
        return int(self.keys.shape[1])

    @property
    def M0(self) -> int:
        return int(self.m0.sum())

    @property
    def M1(self) -> int:
        return int(self.m1.sum())

    @property
    def M(self) -> int:
        return self.M0 + self.M1

    @property
    def buckets(self) -> list[Bucket]:
        return [
            Bucket(tuple(k), int(a), int(b))
            for k, a, b in zip(self.keys.tolist(), self.m0.tolist(), self.m1.tolist())
        ]

    def __len__(self) -> int:
        return self.n_buckets

    def __eq__(self, other):
        if not isinstance(other, AggregatedDataset):
            return NotImplemented
        return (
            self.keys.shape == other.keys.shape
            and bool(np.array_equal(self.keys, other.keys))
            and bool(np.array_equal(self.m0, other.m0))
            and bool(np.array_equal(self.m1, other.m1))
        )

    __hash__ = None

    def index_of(self) -> dict[tuple[int, ...], int]:
        return {tuple(k): i for i, k in enumerate(self.keys.tolist())}

    def scaled(self, factor: int) -> "AggregatedDataset":
        return AggregatedDataset(self.keys, self.m0 * factor, self.m1 * factor, self.feature_names)


def aggregate(table: ObservationTable) -> AggregatedDataset:
    """Group rows by feature combination and count labels per group."""
    names = tuple(table.schema.names) if table.schema is not None else None
    if table.M == 0:
        return AggregatedDataset(
            np.empty((0, table.n_features), dtype=np.int64), [], [], names
        )
    if table.has_missing():
        raise DataError("table still has missing markers; run impute_missing first")
    # np.unique over rows sorts keys lexicographically.
    keys, inverse = np.unique(table.codes, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    n = keys.shape[0]
    m1 = np.bincount(inverse[table.labels == 1], minlength=n).astype(np.int64)
    m0 = np.bincount(inverse[table.labels == 0], minlength=n).astype(np.int64)
    return AggregatedDataset(keys, m0, m1, names)


def disaggregate(B: AggregatedDataset, schema: FeatureSchema | None = None) -> ObservationTable:
    """Expand every bucket back into ``m0 + m1`` rows (class 0 rows first)."""
    sizes = (B.m0 + B.m1).tolist()
    idx = np.repeat(np.arange(B.n_buckets), sizes)
    labels = np.concatenate(
        [np.r_[np.zeros(a, dtype=np.int64), np.ones(b, dtype=np.int64)]
         for a, b in zip(B.m0.tolist(), B.m1.tolist())]
    ) if B.n_buckets else np.empty(0, dtype=np.int64)
    return ObservationTable(B.keys[idx].reshape(-1, B.n_features), labels, schema)


class BucketPartition(NamedTuple):
    """Bucket indices split by purity: class-0 only, class-1 only, and mixed."""

    b0: np.ndarray
    b1: np.ndarray
    b01: np.ndarray

    @property
    def perfect(self) -> np.ndarray:
        return np.sort(np.concatenate([self.b0, self.b1]))

    @property
    def is_perfect(self) -> bool:
        return self.b01.size == 0


def classify_buckets(B: AggregatedDataset) -> BucketPartition:
    idx = np.arange(B.n_buckets)
    return BucketPartition(
        b0=idx[B.m1 == 0],
        b1=idx[B.m0 == 0],
        b01=idx[(B.m0 > 0) & (B.m1 > 0)],
    )


def _header(B: AggregatedDataset) -> list[str]:
    if B.feature_names is not None:
        return list(B.feature_names)
    return [f"F_{i + 1}" for i in range(B.n_features)]


def _display_keys(B: AggregatedDataset, schema: FeatureSchema | None) -> np.ndarray:
    if schema is None:
        return B.keys
    return np.where(B.keys == schema.sentinels[None, :], MISSING, B.keys)


def write_csv(B: AggregatedDataset, path: str | Path, schema: FeatureSchema | None = None) -> None:
    """Table-1 layout: one row per bucket, feature codes then ``m0, m1``."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_header(B) + ["m0", "m1"])
        for key, a, b in zip(_display_keys(B, schema).tolist(), B.m0.tolist(), B.m1.tolist()):
            w.writerow(key + [a, b])


def read_csv(path: str | Path, schema: FeatureSchema | None = None) -> AggregatedDataset:
    with Path(path).open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-2:] != ["m0", "m1"]:
            raise DataError(f"{path}: last two columns must be m0, m1")
        rows = [[int(c) for c in r] for r in reader if r]
    arr = np.array(rows, dtype=np.int64).reshape(-1, len(header))
    keys = arr[:, :-2]
    if schema is not None:
        keys = np.where(keys == MISSING, schema.sentinels[None, :], keys)
    return AggregatedDataset(keys, arr[:, -2], arr[:, -1], tuple(header[:-2]))


def to_json_dict(B: AggregatedDataset, schema: FeatureSchema | None = None) -> dict:
    return {
        "features": _header(B),
        "N_B": B.n_buckets,
        "M": B.M,
        "M0": B.M0,
        "M1": B.M1,
        "buckets": [
            {"key": key, "m0": a, "m1": b}
            for key, a, b in zip(_display_keys(B, schema).tolist(), B.m0.tolist(), B.m1.tolist())
        ],
    }


def from_json_dict(d: dict, schema: FeatureSchema | None = None) -> AggregatedDataset:
    n = len(d["features"])
    keys = np.array([b["key"] for b in d["buckets"]], dtype=np.int64).reshape(-1, n)
    if schema is not None:
        keys = np.where(keys == MISSING, schema.sentinels[None, :], keys)
    B = AggregatedDataset(
        keys,
        [b["m0"] for b in d["buckets"]],
        [b["m1"] for b in d["buckets"]],
        tuple(d["features"]),
    )
    if (B.n_buckets, B.M, B.M0, B.M1) != (d["N_B"], d["M"], d["M0"], d["M1"]):
        raise DataError("aggregated JSON totals do not match its buckets")
    return B


def write_json(B: AggregatedDataset, path: str | Path, schema: FeatureSchema | None = None) -> None:
    Path(path).write_text(json.dumps(to_json_dict(B, schema), indent=2) + "\n", encoding="utf-8")


def read_json(path: str | Path, schema: FeatureSchema | None = None) -> AggregatedDataset:
    return from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")), schema)
