"""Applicant data handling: schema, CSV ingest, joining, cleaning, encoding,
train/test splitting and per-feature summaries.

All values are plain Python data: binary-categorical cells are level strings,
numeric cells are floats, missing cells are ``None``. Every operation here is
a pure function of its inputs (plus an explicit seed where randomness is
involved), so results are reproducible and safe to share between threads.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import (
    BadCsv,
    BadIndex,
    BadLevel,
    BadNumber,
    BadSchema,
    DuplicateKey,
    EmptyAfterClean,
    EmptySubset,
    KeyMissing,
    MissingColumn,
    TooFewRows,
    UnknownFeature,
)

# canonical outcome labels (positive class = enrolled)
ENROLLED = "enrolled"
NOT_ENROLLED = "not_enrolled"

# feature kinds
BINARY = "binary_categorical"
NUMERIC = "numeric"

# cleaning policies
DROP_ROWS = "drop_rows"
IMPUTE_MODE = "impute_mode"

CellValue = str | float | None


@dataclass(frozen=True)
class Feature:
    """One feature definition: a name plus its kind.

    Binary-categorical features carry ``levels = (level0, level1)``; encoding
    maps level0 -> 0.0 and level1 -> 1.0. The direction is declared here,
    never inferred from data order.
    """

    name: str
    kind: str
    levels: tuple[str, str] | None = None


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[Feature, ...]
    target_name: str
    positive_label: str

    def __post_init__(self):
        if not self.features:
            raise BadSchema("schema must declare at least one feature")
        names = [f.name for f in self.features]
        for name in names:
            if not name:
                raise BadSchema("feature names must be non-empty")
        dupes = [n for n, c in Counter(names).items() if c > 1]
        if dupes:
            raise BadSchema(f"duplicate feature names: {dupes}", field=dupes[0])
        if not self.target_name:
            raise BadSchema("target_name must be non-empty")
        if self.target_name in names:
            raise BadSchema(
                f"target {self.target_name!r} must not be a feature", field=self.target_name
            )
        for f in self.features:
            if f.kind == BINARY:
                if f.levels is None or len(f.levels) != 2 or f.levels[0] == f.levels[1]:
                    raise BadSchema(
                        f"binary feature {f.name!r} needs two distinct levels", field=f.name
                    )
            elif f.kind == NUMERIC:
                if f.levels is not None:
                    raise BadSchema(f"numeric feature {f.name!r} cannot have levels", field=f.name)
            else:
                raise BadSchema(f"unknown feature kind {f.kind!r}", field=f.name)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def feature(self, name: str) -> Feature:
        for f in self.features:
            if f.name == name:
                return f
        raise UnknownFeature(f"no feature named {name!r}", field=name)

    def to_dict(self) -> dict:
        feats = []
        for f in self.features:
            entry: dict = {"name": f.name, "kind": f.kind}
            if f.levels is not None:
                entry["levels"] = list(f.levels)
            feats.append(entry)
        return {
            "features": feats,
            "target": self.target_name,
            "positive_label": self.positive_label,
        }

    @staticmethod
    def from_dict(raw: dict) -> "FeatureSchema":
        try:
            feats = tuple(
                Feature(
                    name=str(f["name"]),
                    kind=str(f["kind"]),
                    levels=tuple(str(l) for l in f["levels"]) if "levels" in f else None,
                )
                for f in raw["features"]
            )
            return FeatureSchema(
                features=feats,
                target_name=str(raw["target"]),
                positive_label=str(raw["positive_label"]),
            )
        except (KeyError, TypeError) as exc:
            raise BadSchema(f"malformed schema: {exc}") from exc

    @staticmethod
    def from_json(text: str | bytes) -> "FeatureSchema":
        import json

        try:
            raw = json.loads(text)
        except ValueError as exc:
            raise BadSchema(f"schema is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise BadSchema("schema JSON must be an object")
        return FeatureSchema.from_dict(raw)


@dataclass(frozen=True)
class ApplicantRecord:
    """One applicant: raw feature values plus an optional enrolment outcome."""

    id: str
    values: dict[str, CellValue]
    outcome: str | None = None


@dataclass(frozen=True)
class CleanReport:
    duplicates_removed: int
    rows_dropped: int
    cells_imputed: int

    def to_dict(self) -> dict:
        return {
            "duplicates_removed": self.duplicates_removed,
            "rows_dropped": self.rows_dropped,
            "cells_imputed": self.cells_imputed,
        }


@dataclass(frozen=True)
class RawDataset:
    schema: FeatureSchema
    rows: tuple[ApplicantRecord, ...]
    provenance: tuple[str, ...] = ()


@dataclass(frozen=True)
class CleanDataset:
    """A dataset with no missing values, no duplicate (values, outcome) rows,
    and every row carrying an outcome."""

    schema: FeatureSchema
    rows: tuple[ApplicantRecord, ...]
    provenance: tuple[str, ...] = ()
    report: CleanReport = field(default_factory=lambda: CleanReport(0, 0, 0))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric matrix ``x`` of shape n x (d+1) with an all-ones intercept in
    column 0, a {0,1} target vector ``y``, and feature names for columns 1..d."""

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        x, y = np.asarray(self.x, dtype=float), np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise BadIndex("x must be n x (d+1) and y length n")
        if x.shape[0] < 1 or x.shape[1] < 2:
            raise TooFewRows("design matrix needs n > 0 and d >= 1")
        if len(self.feature_names) != x.shape[1] - 1:
            raise BadIndex("feature_names must align with columns 1..d")
        if not np.all(x[:, 0] == 1.0):
            raise BadIndex("column 0 must be the intercept (all ones)")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise BadIndex("y entries must be 0 or 1")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1] - 1

    def select(self, subset: Iterable[int]) -> "DesignMatrix":
        """Restrict to the given feature indices (intercept always kept)."""
        indices = sorted(set(int(i) for i in subset))
        if not indices:
            raise EmptySubset("feature subset must be non-empty")
        if indices[0] < 0 or indices[-1] >= self.d:
            bad = indices[0] if indices[0] < 0 else indices[-1]
            raise BadIndex(f"feature index {bad} out of range 0..{self.d - 1}")
        cols = [0] + [i + 1 for i in indices]
        return DesignMatrix(
            x=self.x[:, cols].copy(),
            y=self.y.copy(),
            feature_names=tuple(self.feature_names[i] for i in indices),
        )


def _parse_cell(feature: Feature, cell: str, where: str) -> CellValue:
    if cell == "":
        return None
    if feature.kind == BINARY:
        if cell not in feature.levels:
            raise BadLevel(
                f"{where}: {cell!r} is not a level of {feature.name!r} "
                f"(expected one of {list(feature.levels)})",
                field=feature.name,
            )
        return cell
    try:
        value = float(cell)
    except ValueError:
        raise BadNumber(f"{where}: {cell!r} is not numeric for {feature.name!r}",
                        field=feature.name) from None
    if not math.isfinite(value):
        raise BadNumber(f"{where}: non-finite value for {feature.name!r}", field=feature.name)
    return value


def load_csv(
    source: bytes | IO[bytes],
    schema: FeatureSchema,
    source_name: str = "csv",
    require_target: bool = True,
) -> RawDataset:
    """Parse a UTF-8 CSV byte stream against a schema.

    The header must contain every schema feature plus the target column; an
    optional ``id`` column supplies record ids (row numbers otherwise). Empty
    cells become missing. The target cell is compared case-sensitively against
    ``schema.positive_label``; any other non-empty string is the negative class.
    With ``require_target=False`` (prediction inputs) the target column may be
    absent, leaving outcomes missing.
    """
    data = source.read() if hasattr(source, "read") else bytes(source)
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise BadCsv(f"source is not UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        table = list(reader)
    except csv.Error as exc:
        raise BadCsv(f"CSV parse error: {exc}") from exc
    table = [row for row in table if row]  # skip blank lines
    if not table:
        raise MissingColumn("CSV has no header row")
    header = table[0]
    positions = {name: i for i, name in enumerate(header)}
    for f in schema.features:
        if f.name not in positions:
            raise MissingColumn(f"header lacks feature column {f.name!r}", field=f.name)
    target_pos = positions.get(schema.target_name)
    if target_pos is None and require_target:
        raise MissingColumn(
            f"header lacks target column {schema.target_name!r}", field=schema.target_name
        )
    id_pos = positions.get("id")

    records = []
    for rownum, row in enumerate(table[1:], start=2):
        if len(row) != len(header):
            raise BadCsv(f"row {rownum}: expected {len(header)} cells, got {len(row)}")
        values: dict[str, CellValue] = {}
        for f in schema.features:
            values[f.name] = _parse_cell(f, row[positions[f.name]], f"row {rownum}")
        target_cell = row[target_pos] if target_pos is not None else ""
        if target_cell == "":
            outcome = None
        elif target_cell == schema.positive_label:
            outcome = ENROLLED
        else:
            outcome = NOT_ENROLLED
        rec_id = row[id_pos] if id_pos is not None else str(rownum - 1)
        records.append(ApplicantRecord(id=rec_id, values=values, outcome=outcome))
    return RawDataset(schema=schema, rows=tuple(records), provenance=(source_name,))


def join(primary: RawDataset, auxiliary: RawDataset, key: str) -> RawDataset:
    """Left-join auxiliary feature columns onto primary rows by a key feature.

    Primary rows keep all their fields and gain the auxiliary features that
    are new to them; rows without a match get missing auxiliary values. The
    auxiliary outcome column is ignored, as are auxiliary features whose
    names already exist in primary.
    """
    if key not in primary.schema.feature_names:
        raise KeyMissing(f"key {key!r} is not a primary feature", field=key)
    if key not in auxiliary.schema.feature_names:
        raise KeyMissing(f"key {key!r} is not an auxiliary feature", field=key)
    primary_names = set(primary.schema.feature_names)
    gained = tuple(
        f for f in auxiliary.schema.features if f.name != key and f.name not in primary_names
    )

    matches: dict[CellValue, ApplicantRecord] = {}
    for rec in auxiliary.rows:
        value = rec.values.get(key)
        if value is None:
            continue  # unmatchable
        if value in matches:
            raise DuplicateKey(f"auxiliary has multiple rows with {key}={value!r}", field=key)
        matches[value] = rec

    schema = FeatureSchema(
        features=primary.schema.features + gained,
        target_name=primary.schema.target_name,
        positive_label=primary.schema.positive_label,
    )
    rows = []
    for rec in primary.rows:
        match = matches.get(rec.values.get(key))
        values = dict(rec.values)
        for f in gained:
            values[f.name] = match.values.get(f.name) if match is not None else None
        rows.append(replace(rec, values=values))
    return RawDataset(
        schema=schema,
        rows=tuple(rows),
        provenance=primary.provenance + auxiliary.provenance,
    )


def _fill_value(feature: Feature, observed: list[CellValue]) -> CellValue:
    if feature.kind == BINARY:
        level0, level1 = feature.levels
        counts = Counter(observed)
        # ties (including zero observations) resolve to level0
        return level1 if counts[level1] > counts[level0] else level0
    if not observed:
        return 0.0  # nothing to take a median of; documented fallback
    ordered = sorted(observed)
    return ordered[(len(ordered) - 1) // 2]  # lower median


def _dedupe(rows: Sequence[ApplicantRecord], names: Sequence[str]):
    seen = set()
    kept = []
    for rec in rows:
        key = (tuple(rec.values.get(n) for n in names), rec.outcome)
        if key not in seen:
            seen.add(key)
            kept.append(rec)
    return kept, len(rows) - len(kept)


def clean(data: RawDataset, policy: str = IMPUTE_MODE) -> CleanDataset:
    """Deduplicate, drop rows with a missing outcome, then resolve missing
    feature values per policy (``drop_rows`` discards the row; ``impute_mode``
    fills categorical cells with the most frequent level and numeric cells
    with the lower median, ties resolving to level0 / the lower value).

    Cleaning is idempotent: cleaning a clean dataset changes nothing.
    """
    if policy not in (DROP_ROWS, IMPUTE_MODE):
        raise ValueError(f"unknown policy {policy!r}")
    if not data.rows:
        raise EmptyAfterClean("dataset has no rows")
    names = data.schema.feature_names

    rows, duplicates_removed = _dedupe(data.rows, names)

    with_outcome = [r for r in rows if r.outcome is not None]
    rows_dropped = len(rows) - len(with_outcome)

    cells_imputed = 0
    if policy == DROP_ROWS:
        kept = [
            r for r in with_outcome if all(r.values.get(n) is not None for n in names)
        ]
        rows_dropped += len(with_outcome) - len(kept)
    else:
        fills = {
            f.name: _fill_value(
                f, [r.values.get(f.name) for r in with_outcome if r.values.get(f.name) is not None]
            )
            for f in data.schema.features
        }
        kept = []
        for r in with_outcome:
            if all(r.values.get(n) is not None for n in names):
                kept.append(r)
                continue
            values = dict(r.values)
            for n in names:
                if values.get(n) is None:
                    values[n] = fills[n]
                    cells_imputed += 1
            kept.append(replace(r, values=values))

    # imputation can merge previously-distinct rows; enforce the invariant
    kept, merged = _dedupe(kept, names)
    duplicates_removed += merged

    if not kept:
        raise EmptyAfterClean("no rows survive cleaning")
    return CleanDataset(
        schema=data.schema,
        rows=tuple(kept),
        provenance=data.provenance,
        report=CleanReport(duplicates_removed, rows_dropped, cells_imputed),
    )


def encode(data: CleanDataset) -> DesignMatrix:
    """Encode a clean dataset to numbers: level1 -> 1.0, level0 -> 0.0,
    numerics passed through, intercept column prepended, positive outcome -> 1."""
    features = data.schema.features
    n, d = len(data.rows), len(features)
    x = np.ones((n, d + 1), dtype=float)
    y = np.zeros(n, dtype=float)
    for i, rec in enumerate(data.rows):
        for j, f in enumerate(features):
            value = rec.values.get(f.name)
            if f.kind == BINARY:
                if value not in f.levels:
                    raise BadLevel(
                        f"record {rec.id}: {value!r} is not a level of {f.name!r}", field=f.name
                    )
                x[i, j + 1] = 1.0 if value == f.levels[1] else 0.0
            else:
                if value is None:
                    raise BadNumber(f"record {rec.id}: missing numeric {f.name!r}", field=f.name)
                x[i, j + 1] = float(value)
        y[i] = 1.0 if rec.outcome == ENROLLED else 0.0
    return DesignMatrix(x=x, y=y, feature_names=data.schema.feature_names)


def _largest_remainder(quotas: Sequence[float], total: int) -> list[int]:
    """Integer allocation summing to ``total``: floors first, then one extra
    seat per largest fractional remainder (ties to the lowest index)."""
    floors = [int(math.floor(q)) for q in quotas]
    leftover = total - sum(floors)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - floors[i]), i))
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def split(matrix: DesignMatrix, spec: SplitSpec) -> tuple[DesignMatrix, DesignMatrix]:
    """Seeded train/test split; sizes follow largest-remainder rounding of
    the train fraction, applied per class when stratified."""
    n = matrix.n
    if n < 2:
        raise TooFewRows("need at least 2 rows to split")
    f = spec.train_fraction
    train_quota, test_quota = f * n, (1.0 - f) * n
    train_n = int(math.floor(train_quota))
    leftover = n - train_n - int(math.floor(test_quota))
    if leftover and (train_quota - math.floor(train_quota)) >= (
        test_quota - math.floor(test_quota)
    ):
        train_n += 1
    test_n = n - train_n
    if train_n == 0 or test_n == 0:
        raise TooFewRows(f"split {f} of {n} rows leaves an empty part")

    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        class_indices = [np.flatnonzero(matrix.y == c) for c in (0.0, 1.0)]
        class_indices = [idx for idx in class_indices if idx.size > 0]
        counts = [idx.size for idx in class_indices]
        takes = _largest_remainder([train_n * c / n for c in counts], train_n)
        train_parts, test_parts = [], []
        for idx, take in zip(class_indices, takes):
            perm = idx[rng.permutation(idx.size)]
            train_parts.append(perm[:take])
            test_parts.append(perm[take:])
        train_idx = np.sort(np.concatenate(train_parts)).astype(int)
        test_idx = np.sort(np.concatenate(test_parts)).astype(int)
    else:
        perm = rng.permutation(n)
        train_idx = np.sort(perm[:train_n])
        test_idx = np.sort(perm[train_n:])

    def part(idx: np.ndarray) -> DesignMatrix:
        return DesignMatrix(
            x=matrix.x[idx].copy(), y=matrix.y[idx].copy(), feature_names=matrix.feature_names
        )

    return part(train_idx), part(test_idx)


def _format_bucket(lo: float, hi: float, closed: bool) -> str:
    right = "]" if closed else ")"
    return f"[{lo:.6g}, {hi:.6g}{right}"


def summarize(data: CleanDataset, by: str) -> list[tuple[str, int]]:
    """Group counts for one feature: categorical by level, numeric by decile
    buckets. Ordered by descending count, ties lexicographic by label."""
    feature = data.schema.feature(by)  # raises UnknownFeature
    if feature.kind == BINARY:
        counts = Counter(str(rec.values.get(by)) for rec in data.rows)
    else:
        values = np.array([float(rec.values.get(by)) for rec in data.rows])
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            counts = Counter({_format_bucket(lo, hi, True): len(data.rows)})
        else:
            edges = np.unique(np.quantile(values, np.linspace(0.1, 0.9, 9)))
            edges = edges[(edges > lo) & (edges < hi)]
            bucket_of = np.searchsorted(edges, values, side="right")
            bounds = [lo] + list(edges) + [hi]
            counts = Counter()
            for b, count in zip(*np.unique(bucket_of, return_counts=True)):
                label = _format_bucket(bounds[b], bounds[b + 1], b == len(edges))
                counts[label] += int(count)
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def to_csv(data: RawDataset | CleanDataset, negative_label: str = "No") -> str:
    """Render a dataset back to CSV (``id`` column first, schema order after).

    The schema only names the positive target label; ``negative_label`` is
    used for the other class. Missing cells render empty.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = data.schema.feature_names
    writer.writerow(["id", *names, data.schema.target_name])
    for rec in data.rows:
        cells = [rec.id]
        for name in names:
            value = rec.values.get(name)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(str(int(value)) if value.is_integer() else repr(value))
            else:
                cells.append(value)
        if rec.outcome is None:
            cells.append("")
        else:
            cells.append(
                data.schema.positive_label if rec.outcome == ENROLLED else negative_label
            )
        writer.writerow(cells)
    return buf.getvalue()
