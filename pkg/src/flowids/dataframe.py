"""Typed column-major table over labeled flow CSVs.

Columns are declared Categorical, Numeric, or Label up front; nothing is
inferred. Numeric cells must parse to finite 64-bit floats, categorical
cells must be non-empty text (the token "-" is a regular category), and
the label column must hold only 0 or 1.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class SchemaError(ValueError):
    """Declared schema does not match the data."""


class CsvFormatError(ValueError):
    """A cell failed validation; message carries row/column position."""


class ColumnKind(enum.Enum):
    CATEGORICAL = "categorical"
    NUMERIC = "numeric"
    LABEL = "label"


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: ColumnKind


@dataclass
class DataFrame:
    """Immutable-by-convention column store. Values per column:
    Categorical -> list[str], Numeric -> float64 ndarray, Label -> int64 ndarray.
    """

    specs: list[ColumnSpec]
    values: list[object]
    row_count: int = field(default=0)

    def __post_init__(self):
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        for spec, col in zip(self.specs, self.values):
            if len(col) != self.row_count:
                raise SchemaError(
                    f"column {spec.name!r} has {len(col)} values, expected {self.row_count}"
                )

    @property
    def column_names(self) -> list[str]:
        return [s.name for s in self.specs]

    def column(self, name: str):
        for spec, col in zip(self.specs, self.values):
            if spec.name == name:
                return spec, col
        raise SchemaError(f"no column named {name!r}")

    def has_column(self, name: str) -> bool:
        return any(s.name == name for s in self.specs)

    def select(self, names: Sequence[str]) -> "DataFrame":
        """New frame with exactly the named columns, in the given order."""
        picked = [self.column(n) for n in names]
        return DataFrame(
            [s for s, _ in picked], [c for _, c in picked], self.row_count
        )

    def take_rows(self, indices: np.ndarray) -> "DataFrame":
        out = []
        for spec, col in zip(self.specs, self.values):
            if spec.kind is ColumnKind.CATEGORICAL:
                out.append([col[i] for i in indices])
            else:
                out.append(np.asarray(col)[indices])
        return DataFrame(list(self.specs), out, len(indices))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DataFrame):
            return NotImplemented
        if self.specs != other.specs or self.row_count != other.row_count:
            return False
        for spec, a, b in zip(self.specs, self.values, other.values):
            if spec.kind is ColumnKind.CATEGORICAL:
                if list(a) != list(b):
                    return False
            elif not np.array_equal(np.asarray(a), np.asarray(b)):
                return False
        return True


@dataclass
class LabelVector:
    values: np.ndarray  # int64, each entry 0 or 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        bad = (self.values != 0) & (self.values != 1)
        if bad.any():
            i = int(np.argmax(bad))
            raise SchemaError(f"label value {self.values[i]} at row {i} is not 0 or 1")

    def __len__(self) -> int:
        return len(self.values)


def _parse_numeric(token: str, row: int, name: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise CsvFormatError(
            f"row {row}, column {name!r}: {token!r} is not numeric"
        ) from None
    if not np.isfinite(v):
        raise CsvFormatError(f"row {row}, column {name!r}: {token!r} is not finite")
    return v


def load_csv(
    path: str, categorical_names: Iterable[str], label_name: str
) -> DataFrame:
    """Load a headered CSV, assigning each header-named column a kind.

    Columns in categorical_names become Categorical, label_name becomes
    Label, everything else Numeric. Row order is preserved.
    """
    categorical = set(categorical_names)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, expected a header row") from None
        missing = (categorical | {label_name}) - set(header)
        if missing:
            raise SchemaError(
                f"{path}: header missing declared columns {sorted(missing)}"
            )
        specs = []
        for name in header:
            if name == label_name:
                kind = ColumnKind.LABEL
            elif name in categorical:
                kind = ColumnKind.CATEGORICAL
            else:
                kind = ColumnKind.NUMERIC
            specs.append(ColumnSpec(name, kind))

        cols: list[list] = [[] for _ in header]
        for row_idx, row in enumerate(reader):
            if len(row) != len(header):
                raise CsvFormatError(
                    f"row {row_idx}: {len(row)} cells, expected {len(header)}"
                )
            for spec, cell, store in zip(specs, row, cols):
                if spec.kind is ColumnKind.CATEGORICAL:
                    if cell == "":
                        raise CsvFormatError(
                            f"row {row_idx}, column {spec.name!r}: empty categorical cell"
                        )
                    store.append(cell)
                elif spec.kind is ColumnKind.LABEL:
                    if cell not in ("0", "1"):
                        raise CsvFormatError(
                            f"row {row_idx}, column {spec.name!r}: "
                            f"label {cell!r} is not 0 or 1"
                        )
                    store.append(int(cell))
                else:
                    store.append(_parse_numeric(cell, row_idx, spec.name))

    values: list[object] = []
    for spec, store in zip(specs, cols):
        if spec.kind is ColumnKind.CATEGORICAL:
            values.append(store)
        elif spec.kind is ColumnKind.LABEL:
            values.append(np.asarray(store, dtype=np.int64))
        else:
            values.append(np.asarray(store, dtype=np.float64))
    return DataFrame(specs, values, len(cols[0]) if cols else 0)


def write_csv(frame: DataFrame, path: str) -> None:
    """Write a frame back to CSV; numeric cells use repr so reload round-trips."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(frame.column_names)
        for i in range(frame.row_count):
            row = []
            for spec, col in zip(frame.specs, frame.values):
                if spec.kind is ColumnKind.CATEGORICAL:
                    row.append(col[i])
                elif spec.kind is ColumnKind.LABEL:
                    row.append(str(int(col[i])))
                else:
                    row.append(repr(float(col[i])))
            writer.writerow(row)


def drop_columns(
    frame: DataFrame, names: Sequence[str], strict: bool = True
) -> DataFrame:
    """Frame without the named columns; order of the rest preserved."""
    present = set(frame.column_names)
    unknown = [n for n in names if n not in present]
    if unknown and strict:
        raise SchemaError(f"cannot drop unknown columns {unknown}")
    dropped = set(names)
    keep = [n for n in frame.column_names if n not in dropped]
    return frame.select(keep)


def split_xy(frame: DataFrame) -> tuple[DataFrame, LabelVector]:
    """Separate the single Label column from the feature columns."""
    label_cols = [s.name for s in frame.specs if s.kind is ColumnKind.LABEL]
    if len(label_cols) != 1:
        raise SchemaError(
            f"expected exactly one label column, found {len(label_cols)}"
        )
    _, y = frame.column(label_cols[0])
    features = drop_columns(frame, label_cols)
    return features, LabelVector(np.asarray(y))
