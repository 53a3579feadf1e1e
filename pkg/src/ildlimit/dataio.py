"""Loading and encoding of tabular data with categorical features.

Every feature is mapped to a dense integer code space ``0 .. n_i - 1``. Continuous
columns are binned with left-closed intervals, so a value equal to an edge goes
to the higher bin. Missing cells get one extra code per feature (the sentinel,
equal to ``n_i``); on output the sentinel is written as ``-1``.
"""

from __future__ import annotations

import bisect
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, SchemaError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# Marker for a missing cell before imputation. Same value the sentinel is
# reported as on output.
MISSING = -1

DEFAULT_MISSING_VALUES = ("", "NA", "N/A", "NaN", "nan", "?")

CATEGORICAL = "categorical"
BINNED = "binned"


@dataclass(frozen=True)
class FeatureSpec:
    """One categorical feature: either a list of category labels or bin edges."""

    name: str
    column: str
    kind: str
    categories: tuple[str, ...] = ()
    edges: tuple[float, ...] = ()
    allow_missing: bool = True

    def __post_init__(self):
        if self.kind == CATEGORICAL:
            if len(self.categories) < 1:
                raise SchemaError(f"feature {self.name!r}: needs at least one category")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"feature {self.name!r}: duplicate categories")
            if self.edges:
                raise SchemaError(f"feature {self.name!r}: categorical feature with edges")
        elif self.kind == BINNED:
            if len(self.edges) < 1:
                raise SchemaError(f"feature {self.name!r}: needs at least one bin edge")
            if any(not math.isfinite(e) for e in self.edges):
                raise SchemaError(f"feature {self.name!r}: bin edges must be finite")
            if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
                raise SchemaError(f"feature {self.name!r}: bin edges must be strictly increasing")
            if self.categories:
                raise SchemaError(f"feature {self.name!r}: binned feature with categories")
        else:
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")

    @property
    def cardinality(self) -> int:
        """Number of legitimate codes, not counting the sentinel."""
        if self.kind == CATEGORICAL:
            return len(self.categories)
        return len(self.edges) + 1

    @property
    def sentinel(self) -> int:
        return self.cardinality

    @property
    def n_codes(self) -> int:
        """Size of the code space, sentinel included when missing values are allowed."""
        return self.cardinality + int(self.allow_missing)


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[FeatureSpec, ...]
    target: str
    missing_values: tuple[str, ...] = DEFAULT_MISSING_VALUES
    positive_label: str = "1"
    negative_label: str = "0"

    def __post_init__(self):
        if len(self.features) < 1:
            raise SchemaError("schema needs at least one feature")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate feature names")
        if self.target in {f.column for f in self.features}:
            raise SchemaError("target column is also used as a feature")

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def n_codes(self) -> np.ndarray:
        return np.array([f.n_codes for f in self.features], dtype=np.int64)

    @property
    def sentinels(self) -> np.ndarray:
        return np.array([f.sentinel for f in self.features], dtype=np.int64)


def _feature_from_dict(d: dict) -> FeatureSpec:
    if "name" not in d:
        raise SchemaError(f"feature entry without a name: {d}")
    kind = d.get("kind")
    if kind is None:
        kind = BINNED if "edges" in d else CATEGORICAL
    unknown = set(d) - {"name", "column", "kind", "categories", "edges", "allow_missing"}
    if unknown:
        raise SchemaError(f"feature {d['name']!r}: unknown keys {sorted(unknown)}")
    return FeatureSpec(
        name=str(d["name"]),
        column=str(d.get("column", d["name"])),
        kind=kind,
        categories=tuple(str(c) for c in d.get("categories", ())),
        edges=tuple(float(e) for e in d.get("edges", ())),
        allow_missing=bool(d.get("allow_missing", True)),
    )


def schema_from_dict(d: dict) -> FeatureSchema:
    unknown = set(d) - {"target", "features", "missing_values", "positive_label", "negative_label"}
    if unknown:
        raise SchemaError(f"unknown schema keys {sorted(unknown)}")
    if "target" not in d:
        raise SchemaError("schema is missing the 'target' key")
    return FeatureSchema(
        features=tuple(_feature_from_dict(f) for f in d.get("features", ())),
        target=str(d["target"]),
        missing_values=tuple(str(v) for v in d.get("missing_values", DEFAULT_MISSING_VALUES)),
        positive_label=str(d.get("positive_label", "1")),
        negative_label=str(d.get("negative_label", "0")),
    )


def load_schema(path: str | Path) -> FeatureSchema:
    """Read a TOML schema file. See ``schemas/framingham.toml`` for the format."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    return schema_from_dict(raw)


def discretize(value: float, edges: Sequence[float]) -> int:
    """Bin index of ``value``: ``k`` iff ``edges[k-1] <= value < edges[k]``.

    NaN is not binned; it returns ``MISSING`` so imputation can take over.
    """
    if math.isnan(value):
        return MISSING
    return bisect.bisect_right(edges, value)


@dataclass(frozen=True, eq=False)
class ObservationTable:
    """Encoded observations: an ``(M, N)`` code matrix and a 0/1 label vector."""

    codes: np.ndarray
    labels: np.ndarray
    schema: FeatureSchema | None = None

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if codes.ndim != 2:
            n = self.schema.n_features if self.schema is not None else 1
            codes = codes.reshape(-1, n)
        if labels.ndim != 1 or labels.shape[0] != codes.shape[0]:
            raise DataError("labels must be a vector with one entry per row")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        if self.schema is not None:
            if codes.shape[1] != self.schema.n_features:
                raise DataError(
                    f"expected {self.schema.n_features} feature columns, got {codes.shape[1]}"
                )
            upper = np.array([f.cardinality for f in self.schema.features])
            ok = (codes >= 0) & (codes < upper)
            for j, f in enumerate(self.schema.features):
                if f.allow_missing:
                    ok[:, j] |= (codes[:, j] == MISSING) | (codes[:, j] == f.sentinel)
            if not ok.all():
                row, col = np.argwhere(~ok)[0]
                raise DataError(
                    f"row {row}: code {codes[row, col]} invalid for feature "
                    f"{self.schema.features[col].name!r}"
                )
        elif codes.size and codes.min() < MISSING:
            raise DataError("codes must be nonnegative (or -1 for missing)")
        codes.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "labels", labels)

    @property
    def M(self) -> int:
        return int(self.codes.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.codes.shape[1])

    def __len__(self) -> int:
        return self.M

    def has_missing(self) -> bool:
        return bool((self.codes == MISSING).any())

    def take(self, rows: Iterable[int]) -> "ObservationTable":
        idx = np.asarray(list(rows) if not isinstance(rows, np.ndarray) else rows, dtype=np.int64)
        return ObservationTable(self.codes[idx], self.labels[idx], self.schema)

    def equals(self, other: "ObservationTable") -> bool:
        return (
            self.codes.shape == other.codes.shape
            and bool(np.array_equal(self.codes, other.codes))
            and bool(np.array_equal(self.labels, other.labels))
        )


def impute_missing(table: ObservationTable, schema: FeatureSchema | None = None) -> ObservationTable:
    """Replace every missing marker with the sentinel code of its feature.

    All rows missing the same feature end up with the same code there, so they
    land in a common bucket.
    """
    schema = schema or table.schema
    if schema is None:
        raise SchemaError("imputation needs a schema to know the sentinel codes")
    if not table.has_missing():
        return table
    for j, f in enumerate(schema.features):
        if not f.allow_missing and (table.codes[:, j] == MISSING).any():
            raise DataError(f"feature {f.name!r} has missing values but allow_missing is false")
    codes = np.where(table.codes == MISSING, schema.sentinels[None, :], table.codes)
    return ObservationTable(codes, table.labels, schema)


class _Encoder:
    """Per-feature string -> code lookup."""

    def __init__(self, spec: FeatureSpec, missing_values: Sequence[str]):
        self.spec = spec
        self.missing = set(missing_values)
        self.exact = {c: i for i, c in enumerate(spec.categories)}
        self.numeric = {}
        for i, c in enumerate(spec.categories):
            try:
                self.numeric.setdefault(float(c), i)
            except ValueError:
                pass

    def __call__(self, cell: str, where: str) -> int:
        cell = cell.strip()
        if cell in self.missing:
            if not self.spec.allow_missing:
                raise DataError(f"{where}: missing value in column {self.spec.column!r}")
            return MISSING
        if self.spec.kind == BINNED:
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"{where}: cannot parse {cell!r} as a number in column {self.spec.column!r}"
                ) from None
            code = discretize(value, self.spec.edges)
            if code == MISSING and not self.spec.allow_missing:
                raise DataError(f"{where}: NaN in column {self.spec.column!r}")
            return code
        if cell in self.exact:
            return self.exact[cell]
        try:
            code = self.numeric.get(float(cell))
        except ValueError:
            code = None
        if code is None:
            raise DataError(
                f"{where}: value {cell!r} in column {self.spec.column!r} is not a known category"
            )
        return code


def _parse_label(cell: str, schema: FeatureSchema, where: str) -> int:
    cell = cell.strip()
    if cell == schema.positive_label:
        return 1
    if cell == schema.negative_label:
        return 0
    try:
        v = float(cell)
        if v == float(schema.positive_label):
            return 1
        if v == float(schema.negative_label):
            return 0
    except ValueError:
        pass
    raise DataError(f"{where}: target column {schema.target!r} has non-binary value {cell!r}")


def encode_rows(
    rows: Iterable[dict[str, str]], schema: FeatureSchema, impute: bool = True
) -> ObservationTable:
    """Encode raw string records (column name -> cell) under ``schema``."""
    encoders = [_Encoder(f, schema.missing_values) for f in schema.features]
    codes, labels = [], []
    # Line numbers count the header as line 1.
    for lineno, row in enumerate(rows, start=2):
        where = f"line {lineno}"
        codes.append([enc(row[enc.spec.column] or "", where) for enc in encoders])
        labels.append(_parse_label(row[schema.target] or "", schema, where))
    table = ObservationTable(
        np.array(codes, dtype=np.int64).reshape(-1, schema.n_features),
        np.array(labels, dtype=np.int64),
        schema,
    )
    return impute_missing(table, schema) if impute else table


def load_csv(path: str | Path, schema: FeatureSchema, impute: bool = True) -> ObservationTable:
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = [f.column for f in schema.features] + [schema.target]
        absent = [c for c in needed if c not in header]
        if absent:
            raise SchemaError(f"{path}: missing columns {absent}")
        return encode_rows(reader, schema, impute=impute)


def decode_table(table: ObservationTable) -> list[dict[str, str]]:
    """Map codes back to representative raw cells.

    Bins decode to a value inside the bin (its lower edge, or one below the
    first edge), so re-encoding the result gives back the same table.
    """
    schema = table.schema
    if schema is None:
        raise SchemaError("decoding needs a schema")
    missing_cell = schema.missing_values[0] if schema.missing_values else ""
    out = []
    for row, label in zip(table.codes.tolist(), table.labels.tolist()):
        rec = {}
        for code, f in zip(row, schema.features):
            if code == MISSING or (f.allow_missing and code == f.sentinel):
                rec[f.column] = missing_cell
            elif f.kind == CATEGORICAL:
                rec[f.column] = f.categories[code]
            else:
                rec[f.column] = repr(f.edges[code - 1] if code > 0 else f.edges[0] - 1.0)
        rec[schema.target] = schema.positive_label if label == 1 else schema.negative_label
        out.append(rec)
    return out


def dump_encoded_csv(table: ObservationTable, path: str | Path) -> None:
    """Write the encoded table (sentinel shown as -1) for debugging."""
    names = table.schema.names if table.schema else [f"F{i + 1}" for i in range(table.n_features)]
    codes = table.codes
    if table.schema is not None:
        codes = np.where(codes == table.schema.sentinels[None, :], MISSING, codes)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["label"])
        for row, label in zip(codes.tolist(), table.labels.tolist()):
            w.writerow(row + [label])
