"""Reading yearly scorecard CSV files into string-celled tables.

Cells are classified once at load time into :class:`Numeric`, :class:`Text`
or :class:`Missing`; downstream stages never re-parse text.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import EmptyLabelError, RowError, SchemaError

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
CATEGORICAL = "categorical"
KINDS = (NUMERIC, CATEGORICAL)

YEAR = "YEAR"
PUBLIC_LABEL = "NPT4_PUB"
PRIVATE_LABEL = "NPT4_PRIV"
LABEL_COLUMNS = (PUBLIC_LABEL, PRIVATE_LABEL)

# Missingness reasons.
EMPTY = "empty"
NULL_SENTINEL = "null-sentinel"
PRIVACY_SUPPRESSED = "privacy-suppressed"
UNPARSEABLE = "unparseable"

DEFAULT_COLUMN_SPEC = (
    {"name": "COSTT4_A", "kind": NUMERIC},
    {"name": "CONTROL", "kind": CATEGORICAL},
    {"name": "TUITIONFEE_IN", "kind": NUMERIC},
    {"name": "TUITIONFEE_OUT", "kind": NUMERIC},
    {"name": YEAR, "kind": NUMERIC},
)


@dataclass(frozen=True, slots=True)
class Numeric:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"Numeric cell must be finite, got {self.value!r}")


@dataclass(frozen=True, slots=True)
class Text:
    value: str


@dataclass(frozen=True, slots=True)
class Missing:
    reason: str


CellValue = Union[Numeric, Text, Missing]

_SENTINELS = {
    "": Missing(EMPTY),
    "NULL": Missing(NULL_SENTINEL),
    "PrivacySuppressed": Missing(PRIVACY_SUPPRESSED),
}
_UNPARSEABLE = Missing(UNPARSEABLE)


def parse_cell(text: str, column_kind: str, warnings: Counter | None = None) -> CellValue:
    """Classify one raw CSV field.

    Sentinels are matched case-sensitively. A numeric column holding text
    that is neither a sentinel nor a finite decimal becomes
    ``Missing("unparseable")`` and bumps ``warnings["unparseable"]``.
    """
    sentinel = _SENTINELS.get(text)
    if sentinel is not None:
        return sentinel
    if column_kind == CATEGORICAL:
        return Text(text)
    try:
        value = float(text)
    except ValueError:
        value = math.nan
    if not math.isfinite(value):
        if warnings is not None:
            warnings[UNPARSEABLE] += 1
        return _UNPARSEABLE
    return Numeric(value)


@dataclass
class RawTable:
    """Columnar table of classified cells.

    ``columns`` preserves insertion order; ``kinds`` maps every column to
    ``"numeric"`` or ``"categorical"``.
    """

    columns: dict[str, list[CellValue]]
    kinds: dict[str, str]
    provenance: list[tuple[str, int]] = field(default_factory=list)
    warnings: Counter = field(default_factory=Counter)

    def __post_init__(self):
        lengths = {len(cells) for cells in self.columns.values()}
        if len(lengths) > 1:
            raise SchemaError(f"columns have unequal lengths: {sorted(lengths)}")
        if set(self.kinds) != set(self.columns):
            raise SchemaError("every column needs exactly one declared kind")
        bad = {k for k in self.kinds.values() if k not in KINDS}
        if bad:
            raise SchemaError(f"unknown column kinds: {sorted(bad)}")
        if YEAR in self.columns:
            for cell in self.columns[YEAR]:
                if not (isinstance(cell, Numeric) and float(cell.value).is_integer()):
                    raise SchemaError(f"{YEAR} cells must be non-missing integers, got {cell!r}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()), []))

    @property
    def column_names(self) -> list[str]:
        return list(self.columns)

    def missing_fraction(self, name: str) -> float:
        cells = self.columns[name]
        if not cells:
            return 0.0
        return sum(isinstance(c, Missing) for c in cells) / len(cells)

    def missing_counts(self) -> Counter:
        counts: Counter = Counter()
        for cells in self.columns.values():
            counts.update(c.reason for c in cells if isinstance(c, Missing))
        return counts

    def select(self, names: Sequence[str]) -> "RawTable":
        absent = [n for n in names if n not in self.columns]
        if absent:
            raise SchemaError(f"columns not in table: {absent}")
        return RawTable(
            {n: self.columns[n] for n in names},
            {n: self.kinds[n] for n in names},
            list(self.provenance),
            Counter(self.warnings),
        )

    def take(self, rows: Sequence[int] | np.ndarray) -> "RawTable":
        rows = [int(i) for i in rows]
        return RawTable(
            {n: [cells[i] for i in rows] for n, cells in self.columns.items()},
            dict(self.kinds),
            list(self.provenance),
            Counter(self.warnings),
        )


def load_column_spec(path: str | Path | None) -> list[dict]:
    """Read a JSON list of ``{"name", "kind"}`` entries (or return the default)."""
    if path is None:
        return [dict(entry) for entry in DEFAULT_COLUMN_SPEC]
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise SchemaError(f"{path}: column spec must be a JSON list")
    seen = set()
    for entry in entries:
        if not isinstance(entry, dict) or set(entry) != {"name", "kind"}:
            raise SchemaError(f"{path}: bad column spec entry {entry!r}")
        if entry["kind"] not in KINDS:
            raise SchemaError(f"{path}: kind must be one of {KINDS}, got {entry['kind']!r}")
        if entry["name"] in LABEL_COLUMNS:
            raise SchemaError(f"{path}: label column {entry['name']} cannot be a feature")
        if entry["name"] in seen:
            raise SchemaError(f"{path}: duplicate column {entry['name']!r}")
        seen.add(entry["name"])
    return entries


def load_table(path: str | Path, year: int, column_kinds: dict[str, str] | None = None) -> RawTable:
    """Load one comma-separated file and append a ``YEAR`` column.

    With ``column_kinds`` only the declared columns plus the two label
    columns are kept; labels are always numeric. Without it every header
    column is kept as categorical text.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file has no header row") from None
        dupes = sorted(n for n, c in Counter(header).items() if c > 1)
        if dupes:
            raise SchemaError(f"{path}: duplicate header names {dupes}")
        if YEAR in header:
            raise SchemaError(f"{path}: header already has a {YEAR} column")

        if column_kinds is None:
            kinds = {name: CATEGORICAL for name in header}
        else:
            kinds = {name: column_kinds[name] for name in header if name in column_kinds}
        for name in LABEL_COLUMNS:
            if name in header:
                kinds[name] = NUMERIC
        keep = [(i, name) for i, name in enumerate(header) if name in kinds]

        warnings: Counter = Counter()
        columns: dict[str, list[CellValue]] = {name: [] for _, name in keep}
        n_rows = 0
        for row in reader:
            n_rows += 1
            if len(row) != len(header):
                raise RowError(path, reader.line_num,
                               f"expected {len(header)} fields, got {len(row)}")
            for i, name in keep:
                columns[name].append(parse_cell(row[i], kinds[name], warnings))

    columns[YEAR] = [Numeric(float(year))] * n_rows
    kinds = {name: kinds[name] for name in columns if name != YEAR}
    kinds[YEAR] = NUMERIC
    return RawTable(columns, kinds, [(str(path), int(year))], warnings)


def _table_year(table: RawTable) -> int:
    if table.provenance:
        return min(year for _, year in table.provenance)
    cells = table.columns.get(YEAR, [])
    return int(cells[0].value) if cells else 0


def concat_years(tables: Sequence[RawTable]) -> RawTable:
    """Stack yearly tables row-wise over the union of their columns.

    Tables are ordered by year (stable for equal years) so the result does
    not depend on the order files were loaded in. Columns missing from a
    source are filled with ``Missing("empty")``.
    """
    if not tables:
        raise SchemaError("concat_years needs at least one table")
    for t in tables:
        if YEAR not in t.columns:
            raise SchemaError(f"table from {t.provenance} has no {YEAR} column")

    kinds: dict[str, str] = {}
    for t in tables:
        for name, kind in t.kinds.items():
            if kinds.setdefault(name, kind) != kind:
                raise SchemaError(f"column {name!r} declared both {kinds[name]} and {kind}")

    ordered = sorted(tables, key=_table_year)
    fill = Missing(EMPTY)
    columns: dict[str, list[CellValue]] = {name: [] for name in kinds}
    provenance: list[tuple[str, int]] = []
    warnings: Counter = Counter()
    for t in ordered:
        n = t.n_rows
        for name in kinds:
            columns[name].extend(t.columns.get(name, [fill] * n))
        provenance.extend(t.provenance)
        warnings.update(t.warnings)
    return RawTable(columns, kinds, provenance, warnings)


def drop_sparse_columns(table: RawTable, max_missing: float = 0.5,
                        protected: Iterable[str] = LABEL_COLUMNS + (YEAR,)) -> tuple[RawTable, list[str]]:
    """Drop columns whose missing fraction exceeds ``max_missing``."""
    protected = set(protected)
    dropped = [n for n in table.columns
               if n not in protected and table.missing_fraction(n) > max_missing]
    for name in dropped:
        logger.warning("dropping column %s: %.1f%% missing", name, 100 * table.missing_fraction(name))
    keep = [n for n in table.columns if n not in dropped]
    return table.select(keep), dropped


@dataclass
class LabeledTable:
    """Feature columns plus the coalesced net-price label."""

    table: RawTable
    label: np.ndarray
    label_source: list[str]
    n_dropped: int = 0

    def __post_init__(self):
        self.label = np.asarray(self.label, dtype=float)
        if len(self.label) != self.table.n_rows or len(self.label_source) != self.table.n_rows:
            raise SchemaError("label length does not match table rows")
        if not np.all(np.isfinite(self.label)) or np.any(self.label < 0):
            raise SchemaError("labels must be finite and non-negative")

    @property
    def n_rows(self) -> int:
        return self.table.n_rows

    def take(self, rows) -> "LabeledTable":
        rows = np.asarray(rows, dtype=int)
        return LabeledTable(self.table.take(rows), self.label[rows],
                            [self.label_source[i] for i in rows], 0)


def build_labeled(table: RawTable, feature_columns: Sequence[str]) -> LabeledTable:
    """Coalesce ``NPT4_PUB`` then ``NPT4_PRIV`` into one label.

    Rows where neither is numeric (or where the value is negative) are
    dropped; ``n_dropped`` on the result counts them.
    """
    for name in LABEL_COLUMNS:
        if name not in table.columns:
            raise SchemaError(f"table lacks label column {name}")
    clash = [c for c in feature_columns if c in LABEL_COLUMNS]
    if clash:
        raise SchemaError(f"label columns cannot be features: {clash}")

    keep, label, source = [], [], []
    pub, priv = table.columns[PUBLIC_LABEL], table.columns[PRIVATE_LABEL]
    for i in range(table.n_rows):
        if isinstance(pub[i], Numeric) and pub[i].value >= 0:
            keep.append(i)
            label.append(pub[i].value)
            source.append("public")
        elif isinstance(priv[i], Numeric) and priv[i].value >= 0:
            keep.append(i)
            label.append(priv[i].value)
            source.append("private")
    n_dropped = table.n_rows - len(keep)
    if not keep:
        raise EmptyLabelError(f"no row has a usable label ({n_dropped} rows dropped)")
    features = table.select(list(feature_columns)).take(keep)
    return LabeledTable(features, np.array(label), source, n_dropped)


def filter_label_source(data: LabeledTable, policy: str) -> LabeledTable:
    """Restrict rows to ``public_only`` / ``private_only``; ``combined`` is a no-op."""
    if policy == "combined":
        return data
    wanted = {"public_only": "public", "private_only": "private"}.get(policy)
    if wanted is None:
        raise ValueError(f"unknown label policy {policy!r}")
    rows = [i for i, s in enumerate(data.label_source) if s == wanted]
    if not rows:
        raise EmptyLabelError(f"no {wanted} rows left under policy {policy}")
    out = data.take(rows)
    out.n_dropped = data.n_dropped
    return out


# -- snapshot persistence ---------------------------------------------------

def _encode_cell(cell: CellValue):
    if isinstance(cell, Numeric):
        return cell.value
    if isinstance(cell, Text):
        return cell.value
    return {"missing": cell.reason}


def _decode_cell(raw, kind: str) -> CellValue:
    if isinstance(raw, dict):
        return Missing(raw["missing"])
    if kind == NUMERIC:
        return Numeric(float(raw))
    return Text(str(raw))


def labeled_to_dict(data: LabeledTable) -> dict:
    t = data.table
    return {
        "columns": [
            {"name": n, "kind": t.kinds[n], "cells": [_encode_cell(c) for c in cells]}
            for n, cells in t.columns.items()
        ],
        "label": data.label.tolist(),
        "label_source": list(data.label_source),
        "n_dropped": data.n_dropped,
        "provenance": [list(p) for p in t.provenance],
    }


def labeled_from_dict(payload: dict) -> LabeledTable:
    columns, kinds = {}, {}
    for col in payload["columns"]:
        kinds[col["name"]] = col["kind"]
        columns[col["name"]] = [_decode_cell(c, col["kind"]) for c in col["cells"]]
    table = RawTable(columns, kinds, [tuple(p) for p in payload.get("provenance", [])])
    return LabeledTable(table, payload["label"], payload["label_source"], payload.get("n_dropped", 0))
