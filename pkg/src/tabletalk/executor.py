"""Deterministic interpreter for parsed plans.

Every step reads its source (the dataset or an earlier result), applies one
catalog operation, and stores a typed value. The interpreter never consults
a model and never mutates the table, so running the same plan on the same
table always yields the same trace.

execute_plan() statically validates first and refuses to start on a plan
with diagnostics; runtime errors are reserved for data-dependent conditions
(no rows, not enough values, constant columns).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import stats
from .dsl import (
    ArgExtreme,
    Columns,
    Comparison,
    Corr,
    CountCols,
    CountMissing,
    CountMissingAll,
    CountRows,
    Diagnostic,
    Dtypes,
    ExtremeKey,
    Filter,
    GroupAgg,
    HeadN,
    LinRegFit,
    LinRegPredict,
    Op,
    Plan,
    SortTop,
    Stat,
    TopValue,
    ValueCounts,
    render_op,
    validate_plan,
)
from .table import Cell, ColumnarTable, Dtype, format_number
from .profile import head


class ExecutionError(Exception):
    def __init__(self, step_index: int, detail: str):
        self.step_index = step_index
        self.detail = detail
        super().__init__(f"step {step_index}: {detail}")


class InvalidPlan(ExecutionError):
    """The plan failed static validation; carries every diagnostic."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0]
        super().__init__(first.step_index, f"{first.kind}: {first.message}")


class EmptyResult(ExecutionError):
    def __init__(self, step_index: int, op_name: str):
        super().__init__(step_index, f"{op_name} on a table with no rows")


class InsufficientData(ExecutionError):
    def __init__(self, step_index: int, detail: str):
        super().__init__(step_index, detail)


class ZeroVariance(ExecutionError):
    def __init__(self, step_index: int, col: str):
        super().__init__(step_index, f"column {col!r} is constant over the paired rows")


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class TextList:
    values: tuple[str, ...]


@dataclass(frozen=True)
class NumberList:
    values: tuple[float, ...]


@dataclass(frozen=True)
class KeyNumberMap:
    entries: tuple[tuple[str, float], ...]

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)


@dataclass(frozen=True)
class TableRef:
    table: ColumnarTable


@dataclass(frozen=True)
class Model:
    slope: float
    intercept: float
    r: float

    def predict(self, x0: float) -> float:
        return self.slope * x0 + self.intercept


@dataclass(frozen=True)
class NoneOutcome:
    """A well-formed question whose honest answer is 'there is none'."""

    reason: str


Value = Number | Text | TextList | NumberList | KeyNumberMap | TableRef | Model | NoneOutcome


def value_kind(value: Value) -> str:
    return {
        Number: "number",
        Text: "text",
        TextList: "text_list",
        NumberList: "number_list",
        KeyNumberMap: "map",
        TableRef: "table",
        Model: "model",
        NoneOutcome: "none",
    }[type(value)]


def value_summary(value: Value) -> str:
    """One-line human form, used in traces and as the spoken answer."""
    if isinstance(value, Number):
        return format_number(value.value)
    if isinstance(value, Text):
        return value.value
    if isinstance(value, TextList):
        return "[" + ", ".join(value.values) + "]"
    if isinstance(value, NumberList):
        return "[" + ", ".join(format_number(v) for v in value.values) + "]"
    if isinstance(value, KeyNumberMap):
        inner = ", ".join(f"{k}={format_number(v)}" for k, v in value.entries)
        return "{" + inner + "}"
    if isinstance(value, TableRef):
        return f"table with {value.table.row_count} rows"
    if isinstance(value, Model):
        return (
            f"y = {format_number(value.slope)} * x + {format_number(value.intercept)}"
            f" (r={format_number(value.r)})"
        )
    return f"none ({value.reason})"


def value_to_json(value: Value) -> dict:
    kind = value_kind(value)
    if isinstance(value, (Number, Text)):
        payload: object = value.value
    elif isinstance(value, (TextList, NumberList)):
        payload = list(value.values)
    elif isinstance(value, KeyNumberMap):
        payload = value.as_dict()
    elif isinstance(value, TableRef):
        payload = {
            "rows": value.table.row_count,
            "columns": [c.name for c in value.table.columns],
        }
    elif isinstance(value, Model):
        payload = {"slope": value.slope, "intercept": value.intercept, "r": value.r}
    else:
        payload = value.reason
    return {"kind": kind, "value": payload}


def value_from_json(obj: dict) -> Value:
    """Inverse of value_to_json for values that can round-trip."""
    kind, value = obj["kind"], obj["value"]
    if kind == "number":
        return Number(float(value))
    if kind == "text":
        return Text(str(value))
    if kind == "text_list":
        return TextList(tuple(str(v) for v in value))
    if kind == "number_list":
        return NumberList(tuple(float(v) for v in value))
    if kind == "map":
        return KeyNumberMap(tuple((str(k), float(v)) for k, v in value.items()))
    if kind == "model":
        return Model(float(value["slope"]), float(value["intercept"]), float(value.get("r", 0.0)))
    if kind == "none":
        return NoneOutcome(str(value))
    raise ValueError(f"values of kind {kind!r} cannot be reconstructed")


@dataclass(frozen=True)
class StepRecord:
    index: int
    op_text: str
    result: Value

    def trace_line(self) -> str:
        return f"{self.index}: {self.op_text} -> {value_summary(self.result)}"


@dataclass(frozen=True)
class Execution:
    records: tuple[StepRecord, ...]

    @property
    def final(self) -> Value:
        return self.records[-1].result

    def trace_lines(self) -> list[str]:
        return [r.trace_line() for r in self.records]


def _numeric_cells(table: ColumnarTable, name: str) -> list[float]:
    return [float(v) for v in table.column(name).non_missing]


def _pairs(table: ColumnarTable, x: str, y: str) -> list[tuple[float, float]]:
    xs = table.column(x).cells
    ys = table.column(y).cells
    return [(float(a), float(b)) for a, b in zip(xs, ys) if a is not None and b is not None]


def column_stat(table: ColumnarTable, col: str, kind: str, step_index: int = 0) -> Value:
    """One STAT result; preconditions raise the data-dependent errors."""
    column = table.column(col)
    if table.row_count == 0:
        raise EmptyResult(step_index, f"STAT kind={kind}")
    values = column.non_missing
    if kind == "nunique":
        return Number(float(len(set(values))))
    need = 2 if kind in ("std", "var") else 1
    if len(values) < need:
        raise InsufficientData(
            step_index,
            f"STAT kind={kind} on {col!r} needs {need} present value(s), found {len(values)}",
        )
    if kind == "mode":
        found = stats.modes(values)
        if column.dtype is Dtype.NUMERIC:
            return NumberList(tuple(float(v) for v in found))
        return TextList(tuple(found))
    if kind in ("min", "max"):
        pick = min(values) if kind == "min" else max(values)
        return Number(float(pick)) if column.dtype is Dtype.NUMERIC else Text(pick)
    nums = [float(v) for v in values]
    if kind == "mean":
        return Number(stats.mean(nums))
    if kind == "median":
        return Number(stats.median(nums))
    if kind == "std":
        return Number(stats.sample_std(nums))
    if kind == "var":
        return Number(stats.sample_var(nums))
    if kind == "sum":
        return Number(math.fsum(nums))
    if kind == "range":
        return Number(max(nums) - min(nums))
    raise ValueError(f"unknown stat kind {kind!r}")


def correlation(table: ColumnarTable, x: str, y: str, step_index: int = 0) -> float:
    if table.row_count == 0:
        raise EmptyResult(step_index, "CORR")
    pairs = _pairs(table, x, y)
    if len(pairs) < 2:
        raise InsufficientData(step_index, f"CORR needs 2 complete pairs, found {len(pairs)}")
    if len({a for a, _ in pairs}) == 1:
        raise ZeroVariance(step_index, x)
    if len({b for _, b in pairs}) == 1:
        raise ZeroVariance(step_index, y)
    return stats.pearson(pairs)


def linreg(table: ColumnarTable, x: str, y: str, step_index: int = 0) -> Model:
    if table.row_count == 0:
        raise EmptyResult(step_index, "LINREG_FIT")
    pairs = _pairs(table, x, y)
    if len(pairs) < 2:
        raise InsufficientData(
            step_index, f"LINREG_FIT needs 2 complete pairs, found {len(pairs)}"
        )
    if len({a for a, _ in pairs}) == 1:
        raise ZeroVariance(step_index, x)
    slope, intercept = stats.ols(pairs)
    constant_y = len({b for _, b in pairs}) == 1
    return Model(slope, intercept, 0.0 if constant_y else stats.pearson(pairs))


def _satisfies(row: dict[str, Cell], comp: Comparison) -> bool:
    cell = row[comp.column]
    if cell is None:
        return False
    if comp.op == "==":
        return cell == comp.value
    if comp.op == "!=":
        return cell != comp.value
    assert isinstance(cell, float) and isinstance(comp.value, float)
    if comp.op == ">":
        return cell > comp.value
    if comp.op == ">=":
        return cell >= comp.value
    if comp.op == "<":
        return cell < comp.value
    return cell <= comp.value if comp.op == "<=" else False


def filter_rows(table: ColumnarTable, op: Filter) -> ColumnarTable:
    names = [c.name for c in table.columns]
    keep = []
    for i in range(table.row_count):
        row = dict(zip(names, table.row(i)))
        acc = _satisfies(row, op.pred.first)
        for joiner, comp in op.pred.rest:
            hit = _satisfies(row, comp)
            acc = (acc and hit) if joiner == "AND" else (acc or hit)
        if acc:
            keep.append(i)
    return table.take_rows(keep)


def _group_agg(table: ColumnarTable, op: GroupAgg, step_index: int) -> KeyNumberMap:
    by = table.column(op.by)
    target = table.column(op.target)
    groups: dict[str, list[float]] = {}
    sizes: dict[str, int] = {}
    for key_cell, target_cell in zip(by.cells, target.cells):
        if key_cell is None:
            continue
        key = format_number(key_cell) if isinstance(key_cell, float) else key_cell
        sizes[key] = sizes.get(key, 0) + 1
        if target_cell is not None:
            groups.setdefault(key, []).append(float(target_cell))
    if op.agg == "count":
        return KeyNumberMap(tuple((k, float(n)) for k, n in sizes.items()))
    entries = []
    for key in sizes:
        nums = groups.get(key, [])
        if not nums:
            continue
        if op.agg == "mean":
            entries.append((key, stats.mean(nums)))
        elif op.agg == "sum":
            entries.append((key, math.fsum(nums)))
        elif op.agg == "min":
            entries.append((key, min(nums)))
        else:
            entries.append((key, max(nums)))
    if not entries:
        raise InsufficientData(step_index, f"no group has a present {op.target!r} value")
    return KeyNumberMap(tuple(entries))


def _sort_top(table: ColumnarTable, op: SortTop) -> Value:
    out_name = op.return_col if op.return_col is not None else op.col
    col = table.column(op.col)
    out_col = table.column(out_name)
    rows = [
        (col.cells[i], out_col.cells[i])
        for i in range(table.row_count)
        if col.cells[i] is not None and out_col.cells[i] is not None
    ]
    rows.sort(key=lambda pair: pair[0], reverse=op.order == "desc")
    picked = [out for _, out in rows[: op.k]]
    if out_col.dtype is Dtype.NUMERIC:
        return NumberList(tuple(float(v) for v in picked))
    return TextList(tuple(picked))


def _arg_extreme(table: ColumnarTable, op: ArgExtreme, step_index: int) -> Value:
    if table.row_count == 0:
        raise EmptyResult(step_index, "ARG_EXTREME")
    col = table.column(op.col)
    present = [(i, float(v)) for i, v in enumerate(col.cells) if v is not None]
    if not present:
        raise InsufficientData(step_index, f"column {op.col!r} has no present values")
    target = min(v for _, v in present) if op.mode == "min" else max(v for _, v in present)
    row_index = next(i for i, v in present if v == target)
    cell = table.column(op.return_col).cells[row_index]
    if cell is None:
        raise ExecutionError(
            step_index, f"{op.return_col!r} is missing in the selected row"
        )
    if table.column(op.return_col).dtype is Dtype.NUMERIC:
        return Number(float(cell))
    return Text(cell)


def _extreme_key(value: KeyNumberMap, op: ExtremeKey, producer: Op | None, step_index: int) -> Value:
    entries = list(value.entries)
    if op.strict_positive:
        entries = [(k, v) for k, v in entries if v > 0]
    if not entries:
        if isinstance(producer, (CountMissing, CountMissingAll)):
            return NoneOutcome("no missing values")
        if op.strict_positive:
            return NoneOutcome("no strictly positive values")
        return NoneOutcome("empty map result")
    target = min(v for _, v in entries) if op.mode == "min" else max(v for _, v in entries)
    keys = sorted(k for k, v in entries if v == target)
    return Text(keys[0]) if len(keys) == 1 else TextList(tuple(keys))


def eval_op(
    op: Op,
    source_value: ColumnarTable | Value,
    step_index: int = 0,
    producer: Op | None = None,
) -> Value:
    """Evaluate one operation against its resolved source."""
    if isinstance(op, ExtremeKey):
        if not isinstance(source_value, KeyNumberMap):
            raise ExecutionError(step_index, "EXTREME_KEY source is not a map result")
        return _extreme_key(source_value, op, producer, step_index)

    if isinstance(source_value, TableRef):
        table = source_value.table
    elif isinstance(source_value, ColumnarTable):
        table = source_value
    else:
        raise ExecutionError(step_index, f"{op.NAME} source is not a table")

    if isinstance(op, CountRows):
        return Number(float(table.row_count))
    if isinstance(op, CountCols):
        return Number(float(len(table.columns)))
    if isinstance(op, Columns):
        return TextList(tuple(c.name for c in table.columns))
    if isinstance(op, Dtypes):
        return TextList(tuple(f"{c.name}={c.dtype.value}" for c in table.columns))
    if isinstance(op, HeadN):
        return TableRef(head(table, op.n))
    if isinstance(op, CountMissing):
        return Number(float(table.column(op.col).missing_count))
    if isinstance(op, CountMissingAll):
        return KeyNumberMap(tuple((c.name, float(c.missing_count)) for c in table.columns))
    if isinstance(op, Stat):
        return column_stat(table, op.col, op.kind, step_index)
    if isinstance(op, ValueCounts):
        column = table.column(op.col)
        counts = stats.value_counts(column.non_missing)
        return KeyNumberMap(
            tuple(
                (format_number(k) if isinstance(k, float) else k, float(n))
                for k, n in counts.items()
            )
        )
    if isinstance(op, TopValue):
        column = table.column(op.col)
        if table.row_count == 0:
            raise EmptyResult(step_index, "TOP_VALUE")
        if not column.non_missing:
            raise InsufficientData(step_index, f"column {op.col!r} has no present values")
        top = stats.modes(column.non_missing)[0]
        return Number(float(top)) if column.dtype is Dtype.NUMERIC else Text(top)
    if isinstance(op, Corr):
        return Number(correlation(table, op.x, op.y, step_index))
    if isinstance(op, Filter):
        return TableRef(filter_rows(table, op))
    if isinstance(op, GroupAgg):
        return _group_agg(table, op, step_index)
    if isinstance(op, SortTop):
        return _sort_top(table, op)
    if isinstance(op, ArgExtreme):
        return _arg_extreme(table, op, step_index)
    if isinstance(op, LinRegFit):
        return linreg(table, op.x, op.y, step_index)
    if isinstance(op, LinRegPredict):
        raise ExecutionError(step_index, "LINREG_PREDICT must be evaluated with its model")
    raise ValueError(f"unhandled operation {op!r}")


def execute_plan(plan: Plan, table: ColumnarTable) -> Execution:
    """Validate, then run every step; raises ExecutionError on failure."""
    diagnostics = validate_plan(plan, table)
    if diagnostics:
        raise InvalidPlan(diagnostics)
    store: dict[int, Value] = {}
    records: list[StepRecord] = []
    for step in plan.steps:
        op_text = f"{render_op(step.op)} ON {step.source.render()}"
        if isinstance(step.op, LinRegPredict):
            model = store[step.op.model_ref]
            assert isinstance(model, Model)
            result: Value = Number(model.predict(step.op.x0))
        else:
            source_value: ColumnarTable | Value
            producer: Op | None = None
            if step.source.ref is None:
                source_value = table
            else:
                source_value = store[step.source.ref]
                producer = plan.steps[step.source.ref - 1].op
            result = eval_op(step.op, source_value, step.index, producer)
        store[step.index] = result
        records.append(StepRecord(step.index, op_text, result))
    return Execution(tuple(records))
