"""Tabular data loading and construction of base-proposition pools.

A :class:`DataTable` holds one numeric target column plus descriptive
attribute columns (numeric, categorical, or ordinal). From a table,
:func:`build_propositions` materializes an ordered pool of Boolean base
propositions, each with a precomputed row-set extension stored as a dense
bitset. Conjunctive selectors over that pool are handled by :mod:`dcsd.lang`.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError

MISSING_TOKENS = frozenset({"", "?", "na", "n/a", "nan", "null", "none"})

NUMERIC = "numeric"
CATEGORICAL = "categorical"
ORDINAL = "ordinal"

# Pool ordering within one attribute: all "<=" propositions first, then ">=",
# then equalities, then ordinal "<" / ">".
_RELATION_RANK = {"<=": 0, ">=": 1, "=": 2, "<": 3, ">": 4}


class RowSet:
    """Immutable dense bitset over row indices with cached cardinality."""

    __slots__ = ("mask", "size")

    def __init__(self, mask: np.ndarray):
        mask = np.ascontiguousarray(mask, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "size", int(np.count_nonzero(mask)))

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("RowSet is immutable")

    @classmethod
    def full(cls, rows: int) -> "RowSet":
        return cls(np.ones(rows, dtype=bool))

    @classmethod
    def from_indices(cls, indices: Iterable[int], rows: int) -> "RowSet":
        mask = np.zeros(rows, dtype=bool)
        mask[list(indices)] = True
        return cls(mask)

    @property
    def rows(self) -> int:
        return self.mask.shape[0]

    def intersect(self, other: "RowSet") -> "RowSet":
        return RowSet(self.mask & other.mask)

    def issuperset(self, other: "RowSet") -> bool:
        # Occurrence-count shortcut: containment iff every row of `other`
        # also lies in self.
        return int(np.count_nonzero(self.mask & other.mask)) == other.size

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def key(self) -> bytes:
        """Hashable identity of the row set (used to deduplicate results)."""
        return np.packbits(self.mask).tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, RowSet) and self.size == other.size and bool(
            np.array_equal(self.mask, other.mask)
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"RowSet(size={self.size}, rows={self.rows})"


@dataclass(frozen=True)
class AttributeColumn:
    """One descriptive column. Numeric columns store float values with NaN
    as the absent marker; categorical/ordinal columns store strings with
    None as the absent marker. Ordinal columns carry an explicit level
    order."""

    name: str
    kind: str
    values: tuple
    levels: tuple | None = None

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL, ORDINAL):
            raise DataError(f"unknown attribute kind {self.kind!r}")
        if self.kind == ORDINAL and not self.levels:
            raise DataError(f"ordinal column {self.name!r} needs a level order")


@dataclass(frozen=True)
class DataTable:
    """Immutable column-oriented dataset with one numeric target column."""

    target: np.ndarray
    attributes: tuple[AttributeColumn, ...]
    target_name: str = "target"
    dropped_rows: int = 0

    def __post_init__(self):
        target = np.ascontiguousarray(self.target, dtype=np.float64)
        target.setflags(write=False)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if target.ndim != 1 or target.shape[0] == 0:
            raise DataError("target must be a non-empty 1-d column")
        if not np.all(np.isfinite(target)):
            raise DataError("target values must be finite")
        for col in self.attributes:
            if len(col.values) != target.shape[0]:
                raise DataError(
                    f"attribute {col.name!r} has {len(col.values)} entries, "
                    f"expected {target.shape[0]}"
                )

    @property
    def rows(self) -> int:
        return int(self.target.shape[0])

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(col.name for col in self.attributes)


@dataclass(frozen=True)
class Proposition:
    """A single Boolean base predicate over one attribute.

    `id` equals the proposition's 1-based position in the pool; `extension`
    is exactly the set of rows satisfying the predicate."""

    id: int
    attribute: int
    relation: str
    threshold: object
    extension: RowSet

    def describe(self, name: str) -> str:
        return f"{name} {self.relation} {self.threshold}"


class PropositionPool:
    """Ordered pool of base propositions with a stacked extension matrix.

    The order is deterministic (attribute index, then relation, then
    threshold) and defines the lexicographic prefixes used by the
    closed-conjunction refinement operator. Propositions whose extension
    is empty or covers every row are never admitted.
    """

    def __init__(self, props: Sequence[Proposition], rows: int,
                 names: Sequence[str] = ()):
        self._props = tuple(props)
        self.rows = rows
        self.names = tuple(names)
        for expected, prop in enumerate(self._props, start=1):
            if prop.id != expected:
                raise DataError("proposition ids must be contiguous from 1")
            if prop.extension.size in (0, rows):
                raise DataError("propositions with empty or full extension "
                                "are not allowed in a pool")
        if self._props:
            matrix = np.vstack([p.extension.mask for p in self._props])
        else:
            matrix = np.zeros((0, rows), dtype=bool)
        matrix.setflags(write=False)
        self.matrix = matrix

    def __len__(self) -> int:
        return len(self._props)

    def __iter__(self):
        return iter(self._props)

    def prop(self, prop_id: int) -> Proposition:
        if not 1 <= prop_id <= len(self._props):
            raise KeyError(f"unknown proposition id {prop_id}")
        return self._props[prop_id - 1]

    def attribute_name(self, index: int) -> str:
        if self.names and 0 <= index < len(self.names):
            return self.names[index]
        return f"x{index}"

    def describe(self, prop_id: int) -> str:
        prop = self.prop(prop_id)
        return prop.describe(self.attribute_name(prop.attribute))

    @classmethod
    def from_masks(cls, masks: Sequence[np.ndarray], rows: int | None = None,
                   names: Sequence[str] = ()) -> "PropositionPool":
        """Build a synthetic pool from raw Boolean masks (one pseudo
        attribute per mask). Masks that are empty or full are skipped."""
        masks = [np.asarray(m, dtype=bool) for m in masks]
        if rows is None:
            if not masks:
                raise DataError("from_masks needs rows= when no masks are given")
            rows = masks[0].shape[0]
        props = []
        for i, mask in enumerate(masks):
            if mask.shape != (rows,):
                raise DataError("all masks must share the same length")
            size = int(np.count_nonzero(mask))
            if size in (0, rows):
                continue
            props.append(Proposition(id=len(props) + 1, attribute=i,
                                     relation="=", threshold=1,
                                     extension=RowSet(mask)))
        return cls(props, rows, names)


def _parse_float(token: str) -> float | None:
    token = token.strip()
    if token.lower() in MISSING_TOKENS:
        return None
    try:
        value = float(token)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


def _infer_kind(tokens: Sequence[str]) -> str:
    saw_value = False
    for token in tokens:
        stripped = token.strip()
        if stripped.lower() in MISSING_TOKENS:
            continue
        saw_value = True
        try:
            float(stripped)
        except ValueError:
            return CATEGORICAL
    return NUMERIC if saw_value else CATEGORICAL


def _ordinal_levels(tokens: Sequence[str]) -> tuple:
    distinct = {t.strip() for t in tokens if t.strip().lower() not in MISSING_TOKENS}
    try:
        return tuple(sorted(distinct, key=float))
    except ValueError:
        return tuple(sorted(distinct))


def load_csv(path, target_column: str,
             type_hints: Mapping[str, object] | None = None) -> DataTable:
    """Load an RFC-4180 style CSV (header row, UTF-8) into a DataTable.

    Rows whose target cell is missing or unparseable are dropped and the
    drop count is reported as a warning and on the table. Attribute kinds
    are inferred (numeric if every non-missing cell parses as a number,
    categorical otherwise) unless overridden by `type_hints`, which maps a
    column name to "numeric", "categorical", "ordinal", or
    ("ordinal", [level, ...]).
    """
    type_hints = dict(type_hints or {})
    try:
        with open(path, newline="", encoding="utf-8-sig") as handle:
            reader = csv.reader(handle)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    header = [h.strip() for h in header]
    if target_column not in header:
        raise DataError(f"target column {target_column!r} not found "
                        f"(columns: {', '.join(header)})")
    target_idx = header.index(target_column)

    kept_rows = []
    target_values = []
    dropped = 0
    for row in body:
        if len(row) != len(header):
            row = list(row) + [""] * (len(header) - len(row))
        value = _parse_float(row[target_idx]) if target_idx < len(row) else None
        if value is None:
            dropped += 1
            continue
        target_values.append(value)
        kept_rows.append(row)
    if dropped:
        warnings.warn(f"dropped {dropped} rows with missing or unparseable "
                      f"target {target_column!r}", stacklevel=2)
    if not kept_rows:
        raise DataError(f"no rows with a valid target in {path}")

    attributes = []
    for col_idx, name in enumerate(header):
        if col_idx == target_idx:
            continue
        tokens = [row[col_idx] for row in kept_rows]
        hint = type_hints.get(name)
        levels = None
        if isinstance(hint, tuple):
            kind, levels = hint[0], tuple(hint[1])
        elif hint is not None:
            kind = str(hint)
        else:
            kind = _infer_kind(tokens)
        if kind == NUMERIC:
            values = tuple(
                v if (v := _parse_float(t)) is not None else math.nan
                for t in tokens
            )
        else:
            values = tuple(
                None if t.strip().lower() in MISSING_TOKENS else t.strip()
                for t in tokens
            )
            if kind == ORDINAL and levels is None:
                levels = _ordinal_levels(tokens)
        attributes.append(AttributeColumn(name=name, kind=kind,
                                          values=values, levels=levels))

    return DataTable(target=np.array(target_values, dtype=np.float64),
                     attributes=tuple(attributes),
                     target_name=target_column,
                     dropped_rows=dropped)


def _numeric_cut_values(sorted_values: np.ndarray, cuts: int,
                        strategy: str) -> list[float]:
    """Lower-side thresholds for a numeric attribute, always taken from
    observed values so extensions are reproducible across platforms."""
    n = sorted_values.shape[0]
    thresholds = []
    if strategy == "equal-frequency":
        for j in range(1, cuts + 1):
            # order statistic at the j-th cut quantile
            pos = math.ceil(j * n / (cuts + 1))
            pos = min(max(pos, 1), n)
            thresholds.append(float(sorted_values[pos - 1]))
    elif strategy == "equal-width":
        lo = float(sorted_values[0])
        hi = float(sorted_values[-1])
        if hi <= lo:
            return []
        for j in range(1, cuts + 1):
            raw = lo + j * (hi - lo) / (cuts + 1)
            # snap down to the largest observed value <= raw
            pos = int(np.searchsorted(sorted_values, raw, side="right"))
            if pos == 0:
                continue
            thresholds.append(float(sorted_values[pos - 1]))
    else:
        raise DataError(f"unknown binning strategy {strategy!r}")
    return sorted(set(thresholds))


def build_propositions(table: DataTable, cuts: int = 5,
                       strategy: str = "equal-frequency") -> PropositionPool:
    """Materialize the base-proposition pool for a table.

    Numeric attributes contribute complementary "<= t" / ">= s" pairs at
    `cuts` thresholds (s is the smallest observed value above t), so each
    cut splits the observed rows. Categorical attributes contribute one
    equality per distinct value; ordinal attributes contribute strict
    "<" / ">" propositions per level. Rows with a missing attribute value
    fail every proposition on that attribute. Propositions with empty or
    full extensions are dropped.
    """
    if cuts < 1:
        raise DataError("cuts must be >= 1")
    rows = table.rows
    props: list[Proposition] = []

    for attr_idx, col in enumerate(table.attributes):
        # candidate entries: (relation, threshold, sort key, mask)
        candidates: list[tuple[str, object, object, np.ndarray]] = []
        if col.kind == NUMERIC:
            values = np.asarray(col.values, dtype=np.float64)
            observed = np.sort(values[~np.isnan(values)])
            if observed.shape[0] == 0:
                continue
            for low in _numeric_cut_values(observed, cuts, strategy):
                with np.errstate(invalid="ignore"):
                    candidates.append(("<=", low, low, values <= low))
                pos = int(np.searchsorted(observed, low, side="right"))
                if pos < observed.shape[0]:
                    high = float(observed[pos])
                    with np.errstate(invalid="ignore"):
                        candidates.append((">=", high, high, values >= high))
        elif col.kind == CATEGORICAL:
            present = [v for v in col.values if v is not None]
            for level in sorted(set(present)):
                mask = np.fromiter((v == level for v in col.values),
                                   dtype=bool, count=rows)
                candidates.append(("=", level, level, mask))
        else:  # ordinal
            rank = {level: i for i, level in enumerate(col.levels)}
            ranks = np.fromiter(
                (rank.get(v, -1) if v is not None else -1 for v in col.values),
                dtype=np.int64, count=rows)
            valid = np.fromiter(
                (v is not None and v in rank for v in col.values),
                dtype=bool, count=rows)
            for level in col.levels:
                r = rank[level]
                candidates.append(("<", level, r, valid & (ranks < r)))
                candidates.append((">", level, r, valid & (ranks > r)))

        candidates.sort(key=lambda item: (_RELATION_RANK[item[0]], item[2]))
        seen: set[tuple] = set()
        for relation, threshold, _, mask in candidates:
            size = int(np.count_nonzero(mask))
            if size in (0, rows):
                continue
            ident = (relation, threshold)
            if ident in seen:
                continue
            seen.add(ident)
            props.append(Proposition(id=len(props) + 1, attribute=attr_idx,
                                     relation=relation, threshold=threshold,
                                     extension=RowSet(mask)))

    return PropositionPool(props, rows, table.names)
