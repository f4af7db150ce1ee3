"""Brute-force reference answers for benchmark questions.

Everything here is written as plain, obviously-correct loops and is kept
deliberately independent of the executor's statistics kernels: the two code
paths agreeing on randomized tables is the central correctness check of the
whole package, so nothing in this module may import from
:mod:`tabletalk.executor`.
"""

from __future__ import annotations

import math

from ..table import ColumnarTable, Dtype


class OracleError(Exception):
    """The question has no well-defined hand-computable answer."""


def _numbers(table: ColumnarTable, col: str) -> list[float]:
    out = []
    for cell in table.column(col).cells:
        if cell is not None:
            out.append(float(cell))
    return out


def _texts(table: ColumnarTable, col: str) -> list[str]:
    return [c for c in table.column(col).cells if c is not None]


def naive_row_count(table: ColumnarTable) -> int:
    n = 0
    for _ in table.iter_rows():
        n += 1
    return n


def naive_col_count(table: ColumnarTable) -> int:
    return len(table.columns)


def naive_missing_count(table: ColumnarTable, col: str) -> int:
    n = 0
    for cell in table.column(col).cells:
        if cell is None:
            n += 1
    return n


def naive_missing_counts(table: ColumnarTable) -> dict[str, int]:
    return {c.name: naive_missing_count(table, c.name) for c in table.columns}


def naive_mean(table: ColumnarTable, col: str) -> float:
    values = _numbers(table, col)
    if not values:
        raise OracleError(f"no data in {col}")
    total = 0.0
    for v in values:
        total += v
    return total / len(values)


def naive_median(table: ColumnarTable, col: str) -> float:
    values = sorted(_numbers(table, col))
    if not values:
        raise OracleError(f"no data in {col}")
    n = len(values)
    if n % 2 == 1:
        return values[n // 2]
    return (values[n // 2 - 1] + values[n // 2]) / 2.0


def naive_var(table: ColumnarTable, col: str) -> float:
    """Sample variance, two-pass textbook formula."""
    values = _numbers(table, col)
    if len(values) < 2:
        raise OracleError(f"need at least 2 values in {col}")
    m = naive_mean(table, col)
    acc = 0.0
    for v in values:
        acc += (v - m) * (v - m)
    return acc / (len(values) - 1)


def naive_std(table: ColumnarTable, col: str) -> float:
    return math.sqrt(naive_var(table, col))


def naive_min(table: ColumnarTable, col: str):
    dtype = table.column(col).dtype
    values = _numbers(table, col) if dtype is Dtype.NUMERIC else _texts(table, col)
    if not values:
        raise OracleError(f"no data in {col}")
    best = values[0]
    for v in values[1:]:
        if v < best:
            best = v
    return best


def naive_max(table: ColumnarTable, col: str):
    dtype = table.column(col).dtype
    values = _numbers(table, col) if dtype is Dtype.NUMERIC else _texts(table, col)
    if not values:
        raise OracleError(f"no data in {col}")
    best = values[0]
    for v in values[1:]:
        if v > best:
            best = v
    return best


def naive_sum(table: ColumnarTable, col: str) -> float:
    values = _numbers(table, col)
    if not values:
        raise OracleError(f"no data in {col}")
    total = 0.0
    for v in values:
        total += v
    return total


def naive_range(table: ColumnarTable, col: str) -> float:
    return naive_max(table, col) - naive_min(table, col)


def naive_nunique(table: ColumnarTable, col: str) -> int:
    seen = []
    for cell in table.column(col).cells:
        if cell is not None and cell not in seen:
            seen.append(cell)
    return len(seen)


def naive_value_counts(table: ColumnarTable, col: str) -> dict:
    counts: dict = {}
    for cell in table.column(col).cells:
        if cell is None:
            continue
        counts[cell] = counts.get(cell, 0) + 1
    return counts


def naive_mode(table: ColumnarTable, col: str) -> list:
    """All values attaining the highest frequency, sorted ascending."""
    counts = naive_value_counts(table, col)
    if not counts:
        raise OracleError(f"no data in {col}")
    top = max(counts.values())
    return sorted(v for v, n in counts.items() if n == top)


def naive_top_value(table: ColumnarTable, col: str):
    """Most frequent value; ties break to the smallest value."""
    return naive_mode(table, col)[0]


def naive_quartiles(table: ColumnarTable, col: str) -> tuple[float, float, float]:
    """(q25, median, q75) by linear interpolation over the sorted values."""
    values = sorted(_numbers(table, col))
    if not values:
        raise OracleError(f"no data in {col}")

    def at(q: float) -> float:
        pos = q * (len(values) - 1)
        lo = math.floor(pos)
        hi = math.ceil(pos)
        frac = pos - lo
        return values[lo] * (1 - frac) + values[hi] * frac

    return at(0.25), at(0.5), at(0.75)


def naive_pairwise_complete(
    table: ColumnarTable, x: str, y: str
) -> list[tuple[float, float]]:
    xs = table.column(x).cells
    ys = table.column(y).cells
    pairs = []
    for a, b in zip(xs, ys):
        if a is not None and b is not None:
            pairs.append((float(a), float(b)))
    return pairs


def naive_corr(table: ColumnarTable, x: str, y: str) -> float:
    """Pearson r over pairwise-complete rows, plain covariance loops."""
    pairs = naive_pairwise_complete(table, x, y)
    if len(pairs) < 2:
        raise OracleError("need at least 2 pairwise-complete rows")
    n = len(pairs)
    mx = sum(p[0] for p in pairs) / n
    my = sum(p[1] for p in pairs) / n
    sxy = sxx = syy = 0.0
    for a, b in pairs:
        sxy += (a - mx) * (b - my)
        sxx += (a - mx) * (a - mx)
        syy += (b - my) * (b - my)
    if sxx == 0.0 or syy == 0.0:
        raise OracleError("constant column")
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def naive_ols(table: ColumnarTable, x: str, y: str) -> tuple[float, float]:
    """(slope, intercept) of least squares y = slope*x + intercept."""
    pairs = naive_pairwise_complete(table, x, y)
    if len(pairs) < 2:
        raise OracleError("need at least 2 pairwise-complete rows")
    n = len(pairs)
    mx = sum(p[0] for p in pairs) / n
    my = sum(p[1] for p in pairs) / n
    sxy = sxx = 0.0
    for a, b in pairs:
        sxy += (a - mx) * (b - my)
        sxx += (a - mx) * (a - mx)
    if sxx == 0.0:
        raise OracleError("x is constant")
    slope = sxy / sxx
    return slope, my - slope * mx


def naive_predict(table: ColumnarTable, x: str, y: str, x0: float) -> float:
    slope, intercept = naive_ols(table, x, y)
    return slope * x0 + intercept


def naive_filter_rows(table: ColumnarTable, predicate) -> list[int]:
    """Indices of rows where predicate(row_index) is True."""
    return [i for i in range(table.row_count) if predicate(i)]


def naive_compare(cell, op: str, literal) -> bool:
    """Predicate comparison; any comparison against a missing cell is False."""
    if cell is None:
        return False
    if op == "==":
        return cell == literal
    if op == "!=":
        return cell != literal
    if op == ">":
        return cell > literal
    if op == ">=":
        return cell >= literal
    if op == "<":
        return cell < literal
    if op == "<=":
        return cell <= literal
    raise OracleError(f"unknown comparison {op}")


def naive_group_agg(
    table: ColumnarTable, by: str, target: str, agg: str
) -> dict[str, float]:
    """Group rows by the non-missing values of `by` and aggregate `target`.

    `count` counts rows per group regardless of the target; the other
    aggregates run over the group's non-missing target cells, and groups
    with no usable target data are dropped.
    """
    from ..table import format_number

    groups: dict[str, list] = {}
    key_cells = table.column(by).cells
    target_cells = table.column(target).cells
    for key, value in zip(key_cells, target_cells):
        if key is None:
            continue
        label = format_number(key) if isinstance(key, float) else str(key)
        groups.setdefault(label, []).append(value)

    out: dict[str, float] = {}
    for label, values in groups.items():
        if agg == "count":
            out[label] = float(len(values))
            continue
        nums = [float(v) for v in values if v is not None]
        if not nums:
            continue
        if agg == "sum":
            out[label] = sum(nums)
        elif agg == "mean":
            out[label] = sum(nums) / len(nums)
        elif agg == "min":
            out[label] = min(nums)
        elif agg == "max":
            out[label] = max(nums)
        else:
            raise OracleError(f"unknown aggregate {agg}")
    return out


def naive_arg_extreme(
    table: ColumnarTable, col: str, mode: str, return_col: str
):
    """Value of return_col in the first row attaining the extreme of col."""
    best_i = -1
    best = None
    cells = table.column(col).cells
    for i, cell in enumerate(cells):
        if cell is None:
            continue
        v = float(cell)
        if best is None or (mode == "max" and v > best) or (mode == "min" and v < best):
            best = v
            best_i = i
    if best_i < 0:
        raise OracleError(f"no data in {col}")
    result = table.column(return_col).cells[best_i]
    if result is None:
        raise OracleError("extreme row has a missing return cell")
    return result


def naive_sort_top(
    table: ColumnarTable,
    col: str,
    k: int,
    order: str,
    return_col: str | None = None,
) -> list:
    """Top-k values after sorting by col; stable within ties (row order)."""
    out_col = return_col or col
    candidates = []
    for i in range(table.row_count):
        v = table.column(col).cells[i]
        if v is None:
            continue
        if table.column(out_col).cells[i] is None:
            continue
        candidates.append((v, i))
    candidates.sort(key=lambda t: t[1])  # stable base order
    candidates.sort(key=lambda t: t[0], reverse=(order == "desc"))
    return [table.column(out_col).cells[i] for _, i in candidates[:k]]


def naive_extreme_key(
    values: dict[str, float], mode: str, strict_positive: bool
):
    """Key(s) with the extreme value; ties sorted ascending.

    Returns a single key, a sorted list of tied keys, or None when
    strict_positive filtering leaves nothing to compare.
    """
    items = list(values.items())
    if strict_positive:
        items = [(k, v) for k, v in items if v > 0]
    if not items:
        return None
    extreme = max(v for _, v in items) if mode == "max" else min(v for _, v in items)
    keys = sorted(k for k, v in items if v == extreme)
    return keys[0] if len(keys) == 1 else keys
