"""Immutable columnar tables loaded from CSV.

A table is a named collection of equally long columns. Each column is either
Numeric (every non-missing cell is a finite float) or Categorical (cells are
text). Missing cells are represented as ``None``; an empty CSV field is the
one and only encoding of a missing value.

Tables are frozen after load: every derived result elsewhere in the package
(filters, slices, groups) is a new value, so tables can be shared freely
across concurrent queries.
"""

from __future__ import annotations

import csv
import hashlib
import io
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterator, Sequence

Cell = float | str | None

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)$")


class Dtype(str, Enum):
    NUMERIC = "Numeric"
    CATEGORICAL = "Categorical"


class SizeCategory(str, Enum):
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"


class LoadError(Exception):
    """Base class for CSV load failures."""


class EmptyInput(LoadError):
    """The input had no header row."""


class RaggedRow(LoadError):
    """A data row had the wrong number of fields."""

    def __init__(self, row_index: int, expected: int, got: int):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} has {got} fields, expected {expected}"
        )


class DuplicateHeader(LoadError):
    """Two columns share a name."""


class BadHeaderName(LoadError):
    """A column name is empty."""


def parse_number(text: str) -> float | None:
    """Parse ``text`` as a plain signed integer or decimal.

    Leading/trailing whitespace is tolerated. Thousands separators,
    exponents, underscores, and non-finite spellings (nan, inf) are all
    rejected; returns None when the text is not a number under this rule.
    """
    stripped = text.strip()
    if not _NUMBER_RE.match(stripped):
        return None
    return float(stripped)


@dataclass(frozen=True)
class Column:
    """One named, typed column. ``cells`` holds float/str values or None."""

    name: str
    dtype: Dtype
    cells: tuple

    @property
    def missing_count(self) -> int:
        return sum(1 for c in self.cells if c is None)

    @property
    def non_missing(self) -> list:
        return [c for c in self.cells if c is not None]


@dataclass(frozen=True)
class ColumnarTable:
    name: str
    columns: tuple
    row_count: int

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DuplicateHeader(f"duplicate column names in {names}")
        for col in self.columns:
            if not col.name:
                raise BadHeaderName("column names must be non-empty")
            if len(col.cells) != self.row_count:
                raise ValueError(
                    f"column {col.name!r} has {len(col.cells)} cells, "
                    f"table has {self.row_count} rows"
                )

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def schema(self) -> dict[str, Dtype]:
        return {c.name: c.dtype for c in self.columns}

    def row(self, i: int) -> list:
        return [c.cells[i] for c in self.columns]

    def iter_rows(self) -> Iterator[list]:
        for i in range(self.row_count):
            yield self.row(i)

    def take_rows(self, indices: Sequence[int]) -> "ColumnarTable":
        """New table with the given rows, in the given order."""
        cols = tuple(
            Column(c.name, c.dtype, tuple(c.cells[i] for i in indices))
            for c in self.columns
        )
        return ColumnarTable(self.name, cols, len(indices))


def infer_dtype(raw_cells: Sequence[str]) -> Dtype:
    """Numeric iff every non-empty cell parses under parse_number.

    A column with zero non-empty cells is Categorical. Total: never raises.
    """
    saw_any = False
    for cell in raw_cells:
        if cell == "":
            continue
        saw_any = True
        if parse_number(cell) is None:
            return Dtype.CATEGORICAL
    return Dtype.NUMERIC if saw_any else Dtype.CATEGORICAL


def size_category(table: ColumnarTable) -> SizeCategory:
    """Bucket by row count: <100 Small, 100-200 Medium (inclusive), >200 Large."""
    if table.row_count < 100:
        return SizeCategory.SMALL
    if table.row_count <= 200:
        return SizeCategory.MEDIUM
    return SizeCategory.LARGE


def load_csv(
    source: "bytes | str | Path | BinaryIO",
    name: str,
    lenient: bool = False,
) -> ColumnarTable:
    """Load UTF-8, RFC-4180-style CSV with a header row into a table.

    The source may be raw bytes, a file path, or an open binary file.
    Empty fields become missing cells. Column dtypes follow infer_dtype.
    Under the lenient policy a column whose non-empty cells are *mostly*
    (strictly more than half) numeric is typed Numeric and its unparseable
    cells are coerced to missing; the default strict policy never coerces,
    so such a column stays Categorical.
    """
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput("input has no header row") from None
    if not header or all(h.strip() == "" for h in header):
        raise EmptyInput("input has no header row")
    header = [h.strip() for h in header]
    if any(h == "" for h in header):
        raise BadHeaderName("column names must be non-empty")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DuplicateHeader(f"duplicate column names: {', '.join(dupes)}")

    rows: list[list[str]] = []
    for idx, row in enumerate(reader, start=1):
        if row == []:  # skip fully blank trailing lines
            continue
        if len(row) != len(header):
            raise RaggedRow(idx, expected=len(header), got=len(row))
        rows.append(row)

    columns = []
    for j, col_name in enumerate(header):
        raw = [r[j] for r in rows]
        dtype = infer_dtype(raw)
        if dtype is Dtype.CATEGORICAL and lenient:
            parsed = [parse_number(c) for c in raw if c != ""]
            numeric = sum(1 for p in parsed if p is not None)
            if numeric > len(parsed) / 2:
                dtype = Dtype.NUMERIC
        if dtype is Dtype.NUMERIC:
            cells = tuple(parse_number(c) if c != "" else None for c in raw)
        else:
            cells = tuple(c if c != "" else None for c in raw)
        columns.append(Column(col_name, dtype, cells))

    return ColumnarTable(name=name, columns=tuple(columns), row_count=len(rows))


def content_id(data: bytes) -> str:
    """Stable 12-hex-digit id for raw CSV bytes (used by the dataset registry)."""
    return hashlib.sha256(data).hexdigest()[:12]


def format_number(value: float) -> str:
    """Canonical text for a number: integers without a decimal point,
    everything else via repr (shortest round-trip form)."""
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)
