"""Question templates tying together three views of the same task: the
question text shown to the planner, the hand-written reference plan, and
the brute-force ground truth.

Every benchmark question in the bundled suites is an instance of one of
these templates, so oracle_answer() can recover the parameters from the
question text alone and recompute the truth independently of the executor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from ..checker import GroundTruth
from ..table import ColumnarTable, format_number
from . import oracle

_NUM = r"[-+]?\d+(?:\.\d+)?"


class UnknownTemplate(Exception):
    """The question text does not match any known template."""


@dataclass(frozen=True)
class Template:
    name: str
    pattern: re.Pattern
    question: Callable[..., str]
    plan: Callable[..., str]
    answer: Callable[[ColumnarTable, dict], GroundTruth]


def _number(value: float) -> GroundTruth:
    return GroundTruth("number", float(value))


def _step(i: int, rationale: str, op: str) -> str:
    return f"Step {i}: {rationale}\nOP: {op}\n"


def _rows_q() -> str:
    return "How many rows does the table have?"


def _rows_plan() -> str:
    return _step(1, "count the rows", "COUNT_ROWS() ON TABLE")


def _cols_q() -> str:
    return "How many columns does the table have?"


def _cols_plan() -> str:
    return _step(1, "count the columns", "COUNT_COLS() ON TABLE")


def _missing_q(col: str) -> str:
    return f"How many missing values does the {col} column have?"


def _missing_plan(col: str) -> str:
    return _step(1, f"count the gaps in {col}", f"COUNT_MISSING(col={col}) ON TABLE")


def _most_missing_q() -> str:
    return "Which column has the most missing values?"


def _most_missing_plan() -> str:
    return _step(1, "tally missing cells per column", "COUNT_MISSING_ALL() ON TABLE") + _step(
        2,
        "pick the largest strictly positive tally",
        "EXTREME_KEY(mode=max, strict_positive=true) ON REF(1)",
    )


def _most_missing_answer(table: ColumnarTable, params: dict) -> GroundTruth:
    found = oracle.naive_extreme_key(oracle.naive_missing_counts(table), "max", True)
    if found is None:
        raise oracle.OracleError("no column has missing values")
    if isinstance(found, list):
        return GroundTruth("text_list", tuple(found))
    return GroundTruth("text", found)


_STAT_QUESTIONS = {
    "mean": "What is the mean of the {col} column?",
    "median": "What is the median of the {col} column?",
    "std": "What is the sample standard deviation of the {col} column?",
    "sum": "What is the sum of the {col} column?",
    "range": "What is the range of the {col} column?",
    "min": "What is the minimum value in the {col} column?",
    "max": "What is the maximum value in the {col} column?",
}

_STAT_PATTERNS = {
    "mean": r"What is the mean of the (?P<col>\w+) column\?",
    "median": r"What is the median of the (?P<col>\w+) column\?",
    "std": r"What is the sample standard deviation of the (?P<col>\w+) column\?",
    "sum": r"What is the sum of the (?P<col>\w+) column\?",
    "range": r"What is the range of the (?P<col>\w+) column\?",
    "min": r"What is the minimum value in the (?P<col>\w+) column\?",
    "max": r"What is the maximum value in the (?P<col>\w+) column\?",
}

_STAT_ORACLES = {
    "mean": oracle.naive_mean,
    "median": oracle.naive_median,
    "std": oracle.naive_std,
    "sum": oracle.naive_sum,
    "range": oracle.naive_range,
    "min": oracle.naive_min,
    "max": oracle.naive_max,
}


def _stat_q(kind: str, col: str) -> str:
    return _STAT_QUESTIONS[kind].format(col=col)


def _stat_plan(kind: str, col: str) -> str:
    return _step(1, f"take the {kind} of {col}", f"STAT(col={col}, kind={kind}) ON TABLE")


def _stat_answer(kind: str):
    def answer(table: ColumnarTable, params: dict) -> GroundTruth:
        return _number(float(_STAT_ORACLES[kind](table, params["col"])))

    return answer


def _distinct_q(col: str) -> str:
    return f"How many distinct values are in the {col} column?"


def _distinct_plan(col: str) -> str:
    return _step(1, f"count distinct {col} values", f"STAT(col={col}, kind=nunique) ON TABLE")


def _most_common_q(col: str) -> str:
    return f"What is the most common value in the {col} column?"


def _most_common_plan(col: str) -> str:
    return _step(1, f"find the modal {col}", f"TOP_VALUE(col={col}) ON TABLE")


def _corr_q(x: str, y: str) -> str:
    return f"What is the correlation between {x} and {y}?"


def _corr_plan(x: str, y: str) -> str:
    return _step(1, f"correlate {x} with {y}", f"CORR(x={x}, y={y}) ON TABLE")


def _group_mean_q(target: str, by: str) -> str:
    return f"What is the mean {target} for each {by}?"


def _group_mean_plan(target: str, by: str) -> str:
    return _step(
        1,
        f"average {target} within each {by} group",
        f"GROUP_AGG(by={by}, target={target}, agg=mean) ON TABLE",
    )


def _which_extreme_q(ret: str, direction: str, col: str) -> str:
    return f"Which {ret} has the {direction} {col}?"


def _which_extreme_plan(ret: str, direction: str, col: str) -> str:
    mode = "max" if direction == "highest" else "min"
    return _step(
        1,
        f"find the row with the {direction} {col}",
        f"ARG_EXTREME(col={col}, mode={mode}, return_col={ret}) ON TABLE",
    )


def _which_extreme_answer(table: ColumnarTable, params: dict) -> GroundTruth:
    mode = "max" if params["direction"] == "highest" else "min"
    found = oracle.naive_arg_extreme(table, params["col"], mode, params["ret"])
    if isinstance(found, float):
        return _number(found)
    return GroundTruth("text", found)


def _count_above_q(col: str, v: float) -> str:
    return f"How many rows have {col} above {format_number(v)}?"


def _count_above_plan(col: str, v: float) -> str:
    return _step(
        1, f"keep rows with {col} over {format_number(v)}", f"FILTER(pred={col} > {format_number(v)}) ON TABLE"
    ) + _step(2, "count what is left", "COUNT_ROWS() ON REF(1)")


def _count_above_answer(table: ColumnarTable, params: dict) -> GroundTruth:
    v = float(params["v"])
    cells = table.column(params["col"]).cells
    kept = oracle.naive_filter_rows(table, lambda i: oracle.naive_compare(cells[i], ">", v))
    return _number(float(len(kept)))


def _top_k_q(k: int, ret: str, col: str) -> str:
    return f"Which {k} {ret} values have the highest {col}?"


def _top_k_plan(k: int, ret: str, col: str) -> str:
    return _step(
        1,
        f"take the {k} best rows by {col}",
        f"SORT_TOP(col={col}, k={k}, order=desc, return_col={ret}) ON TABLE",
    )


def _top_k_answer(table: ColumnarTable, params: dict) -> GroundTruth:
    found = oracle.naive_sort_top(
        table, params["col"], int(params["k"]), "desc", params["ret"]
    )
    return GroundTruth("text_list", tuple(found))


def _predict_q(y: str, x: str, v: float) -> str:
    return f"Fit a line predicting {y} from {x} and predict {y} when {x} is {format_number(v)}."


def _predict_plan(y: str, x: str, v: float) -> str:
    return _step(1, f"fit {y} against {x}", f"LINREG_FIT(x={x}, y={y}) ON TABLE") + _step(
        2,
        f"read the fit at {format_number(v)}",
        f"LINREG_PREDICT(model_ref=1, x0={format_number(v)}) ON TABLE",
    )


def _predict_answer(table: ColumnarTable, params: dict) -> GroundTruth:
    return _number(oracle.naive_predict(table, params["x"], params["y"], float(params["v"])))


def _simple(name: str, pattern: str, question, plan, answer) -> Template:
    return Template(name, re.compile(pattern), question, plan, answer)


TEMPLATES: tuple[Template, ...] = (
    _simple(
        "rows",
        r"How many rows does the table have\?",
        _rows_q,
        _rows_plan,
        lambda t, p: _number(float(oracle.naive_row_count(t))),
    ),
    _simple(
        "cols",
        r"How many columns does the table have\?",
        _cols_q,
        _cols_plan,
        lambda t, p: _number(float(oracle.naive_col_count(t))),
    ),
    _simple(
        "missing_in",
        r"How many missing values does the (?P<col>\w+) column have\?",
        _missing_q,
        _missing_plan,
        lambda t, p: _number(float(oracle.naive_missing_count(t, p["col"]))),
    ),
    _simple(
        "most_missing",
        r"Which column has the most missing values\?",
        _most_missing_q,
        _most_missing_plan,
        _most_missing_answer,
    ),
    *(
        _simple(
            f"stat_{kind}",
            _STAT_PATTERNS[kind],
            (lambda kind: lambda col: _stat_q(kind, col))(kind),
            (lambda kind: lambda col: _stat_plan(kind, col))(kind),
            _stat_answer(kind),
        )
        for kind in _STAT_QUESTIONS
    ),
    _simple(
        "distinct",
        r"How many distinct values are in the (?P<col>\w+) column\?",
        _distinct_q,
        _distinct_plan,
        lambda t, p: _number(float(oracle.naive_nunique(t, p["col"]))),
    ),
    _simple(
        "most_common",
        r"What is the most common value in the (?P<col>\w+) column\?",
        _most_common_q,
        _most_common_plan,
        lambda t, p: GroundTruth("text", str(oracle.naive_top_value(t, p["col"]))),
    ),
    _simple(
        "corr_between",
        r"What is the correlation between (?P<x>\w+) and (?P<y>\w+)\?",
        _corr_q,
        _corr_plan,
        lambda t, p: _number(oracle.naive_corr(t, p["x"], p["y"])),
    ),
    _simple(
        "group_mean",
        r"What is the mean (?P<target>\w+) for each (?P<by>\w+)\?",
        _group_mean_q,
        _group_mean_plan,
        lambda t, p: GroundTruth("map", oracle.naive_group_agg(t, p["by"], p["target"], "mean")),
    ),
    _simple(
        "which_extreme",
        r"Which (?P<ret>\w+) has the (?P<direction>highest|lowest) (?P<col>\w+)\?",
        _which_extreme_q,
        _which_extreme_plan,
        _which_extreme_answer,
    ),
    _simple(
        "count_above",
        rf"How many rows have (?P<col>\w+) above (?P<v>{_NUM})\?",
        _count_above_q,
        _count_above_plan,
        _count_above_answer,
    ),
    _simple(
        "top_k",
        r"Which (?P<k>\d+) (?P<ret>\w+) values have the highest (?P<col>\w+)\?",
        _top_k_q,
        _top_k_plan,
        _top_k_answer,
    ),
    _simple(
        "predict",
        rf"Fit a line predicting (?P<y>\w+) from (?P<x>\w+) and predict \w+ when \w+ is (?P<v>{_NUM})\.",
        _predict_q,
        _predict_plan,
        _predict_answer,
    ),
)

_BY_NAME = {t.name: t for t in TEMPLATES}


def template(name: str) -> Template:
    return _BY_NAME[name]


def oracle_answer(question: str, table: ColumnarTable) -> GroundTruth:
    """Recompute the ground truth for a templated question by brute force."""
    for t in TEMPLATES:
        m = t.pattern.fullmatch(question)
        if m:
            return t.answer(table, m.groupdict())
    raise UnknownTemplate(f"no template matches {question!r}")
