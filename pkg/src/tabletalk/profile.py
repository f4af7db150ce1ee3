"""Background profiling: head / schema / descriptive summary of a table,
plus the budget-constrained plain-text rendering fed into prompts.

Background text layout (version 1)
----------------------------------
Line 1   ``[background v1] dataset NAME: R rows, C columns (SIZE)``
Line 2   ``columns: Name=num(count), Name=cat(count), ...`` (count = non-missing)
Then, budget permitting, in this fixed order:

* ``head (N rows):`` and one pipe-separated line per row (missing cells blank)
* ``describe:`` with one line per column; numeric lines carry
  ``count mean std min [q25 median q75] max``, categorical lines carry
  ``count unique top freq``; floats are shown with %.6g.

When the token estimate would exceed the budget, sections degrade in a fixed
order: drop head rows, then drop the quartile fields, then drop describe
entirely, leaving the two schema lines. If even those exceed the budget the
rendering fails rather than truncate arbitrarily.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import stats
from .table import ColumnarTable, Dtype, size_category
from .tokens import TokenEstimator, estimate_tokens

BACKGROUND_VERSION = 1

HEAD_ROWS_DEFAULT = 5


class BudgetTooSmall(Exception):
    """Even the schema-only background exceeds the token budget."""

    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"schema-only background needs {needed} tokens, budget is {budget}"
        )


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    dtype: Dtype
    non_missing: int


@dataclass(frozen=True)
class NumericSummary:
    name: str
    count: int
    mean: float | None
    std: float | None  # absent when count < 2
    minimum: float | None
    q25: float | None
    median: float | None
    q75: float | None
    maximum: float | None


@dataclass(frozen=True)
class CategoricalSummary:
    name: str
    count: int
    unique: int
    top: str | None
    top_freq: int | None


@dataclass(frozen=True)
class DatasetProfile:
    name: str
    row_count: int
    column_count: int
    size: str
    head_rows: ColumnarTable
    schema: tuple
    summaries: tuple


def head(table: ColumnarTable, n: int) -> ColumnarTable:
    """First min(n, row_count) rows, column order preserved."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return table.take_rows(range(min(n, table.row_count)))


def describe(table: ColumnarTable, head_n: int = HEAD_ROWS_DEFAULT) -> DatasetProfile:
    """Profile a table: statistics run over non-missing cells only.

    Standard deviation is the sample (n-1) form and quartiles use linear
    interpolation; both choices match the dominant describe convention.
    """
    schema = []
    summaries = []
    for col in table.columns:
        values = col.non_missing
        schema.append(ColumnSchema(col.name, col.dtype, len(values)))
        if col.dtype is Dtype.NUMERIC:
            if not values:
                summaries.append(
                    NumericSummary(col.name, 0, None, None, None, None, None, None, None)
                )
                continue
            nums = [float(v) for v in values]
            summaries.append(
                NumericSummary(
                    name=col.name,
                    count=len(nums),
                    mean=stats.mean(nums),
                    std=stats.sample_std(nums) if len(nums) >= 2 else None,
                    minimum=min(nums),
                    q25=stats.quantile(nums, 0.25),
                    median=stats.quantile(nums, 0.5),
                    q75=stats.quantile(nums, 0.75),
                    maximum=max(nums),
                )
            )
        else:
            if not values:
                summaries.append(CategoricalSummary(col.name, 0, 0, None, None))
                continue
            counts = stats.value_counts(values)
            top = min(k for k, n in counts.items() if n == max(counts.values()))
            summaries.append(
                CategoricalSummary(
                    name=col.name,
                    count=len(values),
                    unique=len(counts),
                    top=top,
                    top_freq=counts[top],
                )
            )
    return DatasetProfile(
        name=table.name,
        row_count=table.row_count,
        column_count=len(table.columns),
        size=size_category(table).value,
        head_rows=head(table, head_n) if table.row_count else table.take_rows([]),
        schema=tuple(schema),
        summaries=tuple(summaries),
    )


def _fmt(value: float) -> str:
    text = format(value, ".6g")
    return text


def _schema_lines(profile: DatasetProfile) -> list[str]:
    abbrev = {Dtype.NUMERIC: "num", Dtype.CATEGORICAL: "cat"}
    cols = ", ".join(
        f"{c.name}={abbrev[c.dtype]}({c.non_missing})" for c in profile.schema
    )
    return [
        f"[background v{BACKGROUND_VERSION}] dataset {profile.name}: "
        f"{profile.row_count} rows, {profile.column_count} columns ({profile.size})",
        f"columns: {cols}",
    ]


def _head_lines(profile: DatasetProfile) -> list[str]:
    slice_ = profile.head_rows
    lines = [f"head ({slice_.row_count} rows):"]
    lines.append("  " + " | ".join(c.name for c in slice_.columns))
    for row in slice_.iter_rows():
        rendered = [
            "" if cell is None else (_fmt(cell) if isinstance(cell, float) else cell)
            for cell in row
        ]
        lines.append("  " + " | ".join(rendered))
    return lines


def _describe_lines(profile: DatasetProfile, quartiles: bool) -> list[str]:
    lines = ["describe:"]
    for s in profile.summaries:
        if isinstance(s, NumericSummary):
            parts = [f"count={s.count}"]
            if s.count >= 1:
                parts.append(f"mean={_fmt(s.mean)}")
                if s.std is not None:
                    parts.append(f"std={_fmt(s.std)}")
                parts.append(f"min={_fmt(s.minimum)}")
                if quartiles:
                    parts.append(f"q25={_fmt(s.q25)}")
                    parts.append(f"median={_fmt(s.median)}")
                    parts.append(f"q75={_fmt(s.q75)}")
                parts.append(f"max={_fmt(s.maximum)}")
            lines.append(f"  {s.name}: " + " ".join(parts))
        else:
            parts = [f"count={s.count}", f"unique={s.unique}"]
            if s.top is not None:
                parts.append(f"top={s.top}")
                parts.append(f"freq={s.top_freq}")
            lines.append(f"  {s.name}: " + " ".join(parts))
    return lines


MAX_LEVEL = 3


def render_level(profile: DatasetProfile, level: int) -> str:
    """Level 0 = full, 1 = no head, 2 = no head or quartiles, 3 = schema only."""
    lines = _schema_lines(profile)
    if level == 0:
        lines += _head_lines(profile)
    if level <= 2:
        lines += _describe_lines(profile, quartiles=level <= 1)
    return "\n".join(lines) + "\n"


def fit_background(
    profile: DatasetProfile,
    budget: int,
    estimator: TokenEstimator = estimate_tokens,
) -> tuple[str, int]:
    """(text, level) for the richest degradation level fitting the budget.

    Tries the levels in order and raises BudgetTooSmall when none fits.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    for level in range(MAX_LEVEL + 1):
        text = render_level(profile, level)
        if estimator(text) <= budget:
            return text, level
    raise BudgetTooSmall(estimator(render_level(profile, MAX_LEVEL)), budget)


def render_background(
    profile: DatasetProfile,
    budget: int,
    estimator: TokenEstimator = estimate_tokens,
) -> str:
    """Render the profile as plain text fitting the token budget."""
    return fit_background(profile, budget, estimator)[0]
