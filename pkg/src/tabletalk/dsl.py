"""The closed plan language: a fixed catalog of tabular operations, a
line-oriented surface syntax, and a static validator.

A plan is a numbered sequence of steps. Each step is one rationale line
followed by one operation line::

    Step 1: narrow to the sunny rows first
    OP: FILTER(pred=Clouds == "Sun") ON TABLE
    Step 2: the hottest of those, reported by city name
    OP: ARG_EXTREME(col=Temp, mode=max, return_col=City) ON REF(1)

``ON TABLE`` reads the dataset itself; ``ON REF(i)`` reads the result of an
earlier step. References only point backwards. Arguments are keyword style
in any order; strings are double-quoted, numbers and enum words are bare.

Parsing is strict: anything outside the grammar raises PlanSyntaxError with
the offending line number, so a caller can hand the message back to whoever
wrote the plan. validate_plan() then checks the parsed plan against a
concrete table (column names, dtypes, reference shapes) without executing
anything.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from typing import ClassVar

from .table import ColumnarTable, Dtype, format_number

STAT_KINDS = ("mean", "median", "mode", "std", "var", "min", "max", "sum", "range", "nunique")
NUMERIC_ONLY_STAT_KINDS = frozenset({"mean", "median", "std", "var", "sum", "range"})
GROUP_AGGS = ("mean", "sum", "count", "min", "max")
COMPARE_OPS = ("==", "!=", ">", ">=", "<", "<=")
ORDER_OPS = frozenset({">", ">=", "<", "<="})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)\Z")


class PlanSyntaxError(Exception):
    """A plan line that does not fit the grammar."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class NonConsecutiveStep(PlanSyntaxError):
    def __init__(self, line: int, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(line, f"expected Step {expected}, got Step {got}")


class ForwardRef(PlanSyntaxError):
    def __init__(self, line: int, ref: int, step: int):
        self.ref = ref
        self.step = step
        super().__init__(line, f"step {step} references step {ref}, which is not earlier")


class UnknownOp(PlanSyntaxError):
    def __init__(self, line: int, name: str):
        self.name = name
        super().__init__(line, f"unknown operation {name}")


class BadArg(PlanSyntaxError):
    def __init__(self, line: int, op: str, key: str, reason: str):
        self.op = op
        self.key = key
        super().__init__(line, f"{op}: argument {key}: {reason}")


@dataclass(frozen=True)
class Source:
    """Where a step reads from: the dataset (ref=None) or step ``ref``."""

    ref: int | None = None

    def render(self) -> str:
        return "TABLE" if self.ref is None else f"REF({self.ref})"


@dataclass(frozen=True)
class Comparison:
    column: str
    op: str
    value: float | str


@dataclass(frozen=True)
class Predicate:
    """Left-associative chain: ((first ∘ rest[0]) ∘ rest[1]) ... No precedence."""

    first: Comparison
    rest: tuple[tuple[str, Comparison], ...] = ()

    def comparisons(self) -> list[Comparison]:
        return [self.first] + [c for _, c in self.rest]


@dataclass(frozen=True)
class CountRows:
    NAME: ClassVar[str] = "COUNT_ROWS"


@dataclass(frozen=True)
class CountCols:
    NAME: ClassVar[str] = "COUNT_COLS"


@dataclass(frozen=True)
class Columns:
    NAME: ClassVar[str] = "COLUMNS"


@dataclass(frozen=True)
class Dtypes:
    NAME: ClassVar[str] = "DTYPES"


@dataclass(frozen=True)
class HeadN:
    NAME: ClassVar[str] = "HEAD"
    n: int


@dataclass(frozen=True)
class CountMissing:
    NAME: ClassVar[str] = "COUNT_MISSING"
    col: str


@dataclass(frozen=True)
class CountMissingAll:
    NAME: ClassVar[str] = "COUNT_MISSING_ALL"


@dataclass(frozen=True)
class Stat:
    NAME: ClassVar[str] = "STAT"
    col: str
    kind: str


@dataclass(frozen=True)
class ValueCounts:
    NAME: ClassVar[str] = "VALUE_COUNTS"
    col: str


@dataclass(frozen=True)
class TopValue:
    NAME: ClassVar[str] = "TOP_VALUE"
    col: str


@dataclass(frozen=True)
class Corr:
    NAME: ClassVar[str] = "CORR"
    x: str
    y: str


@dataclass(frozen=True)
class Filter:
    NAME: ClassVar[str] = "FILTER"
    pred: Predicate


@dataclass(frozen=True)
class GroupAgg:
    NAME: ClassVar[str] = "GROUP_AGG"
    by: str
    target: str
    agg: str


@dataclass(frozen=True)
class SortTop:
    NAME: ClassVar[str] = "SORT_TOP"
    col: str
    k: int
    order: str
    return_col: str | None = None


@dataclass(frozen=True)
class ArgExtreme:
    NAME: ClassVar[str] = "ARG_EXTREME"
    col: str
    mode: str
    return_col: str


@dataclass(frozen=True)
class ExtremeKey:
    NAME: ClassVar[str] = "EXTREME_KEY"
    mode: str
    strict_positive: bool = False


@dataclass(frozen=True)
class LinRegFit:
    NAME: ClassVar[str] = "LINREG_FIT"
    x: str
    y: str


@dataclass(frozen=True)
class LinRegPredict:
    NAME: ClassVar[str] = "LINREG_PREDICT"
    model_ref: int
    x0: float


Op = (
    CountRows | CountCols | Columns | Dtypes | HeadN | CountMissing
    | CountMissingAll | Stat | ValueCounts | TopValue | Corr | Filter
    | GroupAgg | SortTop | ArgExtreme | ExtremeKey | LinRegFit | LinRegPredict
)

TABLE_PRODUCERS = (HeadN, Filter)
MAP_PRODUCERS = (CountMissingAll, ValueCounts, GroupAgg)


@dataclass(frozen=True)
class PlanStep:
    index: int
    rationale: str
    op: Op
    source: Source


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]


@dataclass(frozen=True)
class Diagnostic:
    """One static-validation finding, tied to a 1-based step index."""

    step_index: int
    kind: str  # UnknownColumn | DtypeMismatch | BadModelRef | RefTypeMismatch
    message: str


# key → (value form, required). Forms: col, int, float, bool, enum:<choices>, pred, ref
_OP_ARGS: dict[str, dict[str, tuple[str, bool]]] = {
    "COUNT_ROWS": {},
    "COUNT_COLS": {},
    "COLUMNS": {},
    "DTYPES": {},
    "HEAD": {"n": ("int", True)},
    "COUNT_MISSING": {"col": ("col", True)},
    "COUNT_MISSING_ALL": {},
    "STAT": {"col": ("col", True), "kind": ("enum:" + ",".join(STAT_KINDS), True)},
    "VALUE_COUNTS": {"col": ("col", True)},
    "TOP_VALUE": {"col": ("col", True)},
    "CORR": {"x": ("col", True), "y": ("col", True)},
    "FILTER": {"pred": ("pred", True)},
    "GROUP_AGG": {
        "by": ("col", True),
        "target": ("col", True),
        "agg": ("enum:" + ",".join(GROUP_AGGS), True),
    },
    "SORT_TOP": {
        "col": ("col", True),
        "k": ("int", True),
        "order": ("enum:asc,desc", True),
        "return_col": ("col", False),
    },
    "ARG_EXTREME": {
        "col": ("col", True),
        "mode": ("enum:max,min", True),
        "return_col": ("col", True),
    },
    "EXTREME_KEY": {"mode": ("enum:max,min", True), "strict_positive": ("bool", False)},
    "LINREG_FIT": {"x": ("col", True), "y": ("col", True)},
    "LINREG_PREDICT": {"model_ref": ("ref", True), "x0": ("float", True)},
}

_OP_TYPES: dict[str, type] = {
    cls.NAME: cls
    for cls in (
        CountRows, CountCols, Columns, Dtypes, HeadN, CountMissing,
        CountMissingAll, Stat, ValueCounts, TopValue, Corr, Filter,
        GroupAgg, SortTop, ArgExtreme, ExtremeKey, LinRegFit, LinRegPredict,
    )
}

_STEP_RE = re.compile(r"Step (\d+):\s*(.*)\Z")
_OP_LINE_RE = re.compile(r"OP:\s*(.*)\Z")
_CALL_HEAD_RE = re.compile(r"([A-Z_][A-Z0-9_]*)\(")
_SOURCE_RE = re.compile(r"ON\s+(?:TABLE|REF\((\d+)\))\Z")


def _split_call(text: str, line_no: int) -> tuple[str, str, str]:
    """'NAME(args) ON SRC' → (name, args text, source text)."""
    m = _CALL_HEAD_RE.match(text)
    if not m:
        raise PlanSyntaxError(line_no, "expected OP_NAME(...) ON TABLE or ON REF(i)")
    depth, in_str = 1, False
    i = m.end()
    while i < len(text) and depth:
        ch = text[i]
        if in_str:
            in_str = ch != '"'
        elif ch == '"':
            in_str = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        i += 1
    if depth:
        raise PlanSyntaxError(line_no, "unbalanced parentheses in operation call")
    return m.group(1), text[m.end() : i - 1], text[i:].strip()


def _split_args(args_text: str, line_no: int) -> list[str]:
    parts: list[str] = []
    buf: list[str] = []
    in_str = False
    for ch in args_text:
        if ch == '"':
            in_str = not in_str
        if ch == "," and not in_str:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    parts = [p.strip() for p in parts]
    if parts == [""]:
        return []
    if any(not p for p in parts):
        raise PlanSyntaxError(line_no, "empty argument in operation call")
    return parts


_PRED_TOKEN_RE = re.compile(
    r'\s*(?:(?P<str>"[^"]*")|(?P<cmp>==|!=|>=|<=|>|<)'
    r"|(?P<num>[+-]?(?:\d+\.?\d*|\.\d+))|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize_predicate(text: str, line_no: int) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _PRED_TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise PlanSyntaxError(line_no, f"bad predicate near {text[pos:].strip()!r}")
            break
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    return tokens


def _parse_predicate(text: str, line_no: int) -> Predicate:
    tokens = _tokenize_predicate(text, line_no)
    pos = 0

    def comparison() -> Comparison:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] not in ("ident", "str"):
            raise PlanSyntaxError(line_no, "predicate comparison must start with a column name")
        kind, tok = tokens[pos]
        column = tok[1:-1] if kind == "str" else tok
        pos += 1
        if pos >= len(tokens) or tokens[pos][0] != "cmp":
            raise PlanSyntaxError(line_no, f"expected comparison operator after {column!r}")
        op = tokens[pos][1]
        pos += 1
        if pos >= len(tokens) or tokens[pos][0] not in ("num", "str"):
            raise PlanSyntaxError(line_no, "predicate literal must be a number or quoted string")
        kind, tok = tokens[pos]
        value: float | str = float(tok) if kind == "num" else tok[1:-1]
        pos += 1
        return Comparison(column, op, value)

    first = comparison()
    rest: list[tuple[str, Comparison]] = []
    while pos < len(tokens):
        kind, tok = tokens[pos]
        if kind != "ident" or tok not in ("AND", "OR"):
            raise PlanSyntaxError(line_no, f"expected AND or OR, got {tok!r}")
        pos += 1
        rest.append((tok, comparison()))
    return Predicate(first, tuple(rest))


def _coerce_arg(op: str, key: str, form: str, raw: str, line_no: int, step: int):
    quoted = len(raw) >= 2 and raw[0] == '"' and raw[-1] == '"'
    if form == "col":
        if quoted:
            return raw[1:-1]
        if _IDENT_RE.match(raw):
            return raw
        raise BadArg(line_no, op, key, f"expected a column name, got {raw!r}")
    if form == "int":
        if not raw.lstrip("+").isdigit() or int(raw) < 1:
            raise BadArg(line_no, op, key, f"expected a positive integer, got {raw!r}")
        return int(raw)
    if form == "ref":
        if not raw.isdigit() or int(raw) < 1:
            raise BadArg(line_no, op, key, f"expected a step number, got {raw!r}")
        ref = int(raw)
        if ref >= step:
            raise ForwardRef(line_no, ref, step)
        return ref
    if form == "float":
        if not _NUMBER_RE.match(raw):
            raise BadArg(line_no, op, key, f"expected a number, got {raw!r}")
        return float(raw)
    if form == "bool":
        if raw not in ("true", "false"):
            raise BadArg(line_no, op, key, f"expected true or false, got {raw!r}")
        return raw == "true"
    if form == "pred":
        return _parse_predicate(raw, line_no)
    choices = form.split(":", 1)[1].split(",")
    if raw not in choices:
        raise BadArg(line_no, op, key, f"expected one of {', '.join(choices)}, got {raw!r}")
    return raw


def _parse_op(text: str, line_no: int, step: int) -> tuple[Op, Source]:
    name, args_text, source_text = _split_call(text, line_no)
    if name not in _OP_ARGS:
        raise UnknownOp(line_no, name)
    m = _SOURCE_RE.fullmatch(source_text)
    if not m:
        raise PlanSyntaxError(line_no, "operation must end with ON TABLE or ON REF(i)")
    if m.group(1) is None:
        source = Source()
    else:
        ref = int(m.group(1))
        if ref < 1:
            raise PlanSyntaxError(line_no, "REF index must be >= 1")
        if ref >= step:
            raise ForwardRef(line_no, ref, step)
        source = Source(ref)

    spec = _OP_ARGS[name]
    kwargs: dict[str, object] = {}
    for part in _split_args(args_text, line_no):
        key, eq, raw = part.partition("=")
        key, raw = key.strip(), raw.strip()
        if not eq or not key:
            raise PlanSyntaxError(line_no, f"argument {part!r} is not key=value")
        if key not in spec:
            raise BadArg(line_no, name, key, "unknown argument")
        if key in kwargs:
            raise BadArg(line_no, name, key, "duplicate argument")
        if not raw:
            raise BadArg(line_no, name, key, "empty value")
        kwargs[key] = _coerce_arg(name, key, spec[key][0], raw, line_no, step)
    for key, (_, required) in spec.items():
        if required and key not in kwargs:
            raise BadArg(line_no, name, key, "missing required argument")
    return _OP_TYPES[name](**kwargs), source


def parse_plan(text: str) -> Plan:
    """Parse plan text, or raise PlanSyntaxError pointing at the bad line."""
    lines = text.splitlines()
    steps: list[PlanStep] = []
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        m = _STEP_RE.fullmatch(lines[i].strip())
        if not m:
            raise PlanSyntaxError(i + 1, f"expected a Step line, got {lines[i].strip()!r}")
        number, rationale = int(m.group(1)), m.group(2).strip()
        expected = len(steps) + 1
        if number != expected:
            raise NonConsecutiveStep(i + 1, expected, number)
        i += 1
        while i < len(lines) and not lines[i].strip():
            i += 1
        if i >= len(lines):
            raise PlanSyntaxError(len(lines), f"Step {number} has no OP line")
        m2 = _OP_LINE_RE.fullmatch(lines[i].strip())
        if not m2:
            raise PlanSyntaxError(i + 1, f"expected an OP line, got {lines[i].strip()!r}")
        op, source = _parse_op(m2.group(1).strip(), i + 1, number)
        steps.append(PlanStep(number, rationale, op, source))
        i += 1
    if not steps:
        raise PlanSyntaxError(1, "plan has no steps")
    return Plan(tuple(steps))


def _render_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return format_number(float(value))
    if isinstance(value, Predicate):
        return render_predicate(value)
    text = str(value)
    return text if _IDENT_RE.match(text) else f'"{text}"'


def render_predicate(pred: Predicate) -> str:
    def one(c: Comparison) -> str:
        col = c.column if _IDENT_RE.match(c.column) else f'"{c.column}"'
        val = f'"{c.value}"' if isinstance(c.value, str) else format_number(c.value)
        return f"{col} {c.op} {val}"

    parts = [one(pred.first)]
    for joiner, comp in pred.rest:
        parts.append(joiner)
        parts.append(one(comp))
    return " ".join(parts)


def render_op(op: Op) -> str:
    rendered = []
    for f in fields(op):
        value = getattr(op, f.name)
        if value is None:
            continue
        rendered.append(f"{f.name}={_render_value(value)}")
    return f"{op.NAME}({', '.join(rendered)})"


def render_plan(plan: Plan) -> str:
    """Canonical text form; parse_plan(render_plan(p)) reproduces p."""
    lines = []
    for step in plan.steps:
        lines.append(f"Step {step.index}: {step.rationale}".rstrip())
        lines.append(f"OP: {render_op(step.op)} ON {step.source.render()}")
    return "\n".join(lines) + "\n"


def _source_shape(step: PlanStep, plan: Plan) -> str:
    if step.source.ref is None:
        return "table"
    ref_op = plan.steps[step.source.ref - 1].op
    if isinstance(ref_op, TABLE_PRODUCERS):
        return "table"
    if isinstance(ref_op, MAP_PRODUCERS):
        return "map"
    return "scalar"


def _check_columns(step: PlanStep, dtypes: dict[str, Dtype], out: list[Diagnostic]) -> None:
    def exists(name: str) -> bool:
        if name not in dtypes:
            out.append(Diagnostic(step.index, "UnknownColumn", f"no column named {name!r}"))
            return False
        return True

    def require_numeric(name: str, why: str) -> None:
        if exists(name) and dtypes[name] is not Dtype.NUMERIC:
            out.append(Diagnostic(step.index, "DtypeMismatch", f"{why} needs a Numeric column, {name!r} is Categorical"))

    op = step.op
    if isinstance(op, CountMissing | ValueCounts | TopValue):
        exists(op.col)
    elif isinstance(op, Stat):
        if op.kind in NUMERIC_ONLY_STAT_KINDS:
            require_numeric(op.col, f"STAT kind={op.kind}")
        else:
            exists(op.col)
    elif isinstance(op, Corr | LinRegFit):
        require_numeric(op.x, op.NAME)
        require_numeric(op.y, op.NAME)
    elif isinstance(op, Filter):
        for comp in op.pred.comparisons():
            if not exists(comp.column):
                continue
            dtype = dtypes[comp.column]
            if comp.op in ORDER_OPS and dtype is not Dtype.NUMERIC:
                out.append(Diagnostic(step.index, "DtypeMismatch", f"ordering comparison {comp.op} needs a Numeric column, {comp.column!r} is Categorical"))
            elif dtype is Dtype.NUMERIC and isinstance(comp.value, str):
                out.append(Diagnostic(step.index, "DtypeMismatch", f"column {comp.column!r} is Numeric but is compared to a string"))
            elif dtype is Dtype.CATEGORICAL and isinstance(comp.value, float):
                out.append(Diagnostic(step.index, "DtypeMismatch", f"column {comp.column!r} is Categorical but is compared to a number"))
    elif isinstance(op, GroupAgg):
        exists(op.by)
        if op.agg == "count":
            exists(op.target)
        else:
            require_numeric(op.target, f"GROUP_AGG agg={op.agg}")
    elif isinstance(op, SortTop):
        exists(op.col)
        if op.return_col is not None:
            exists(op.return_col)
    elif isinstance(op, ArgExtreme):
        require_numeric(op.col, "ARG_EXTREME")
        exists(op.return_col)


def validate_plan(plan: Plan, table: ColumnarTable) -> list[Diagnostic]:
    """Static checks against a table. An empty list means the plan is runnable."""
    dtypes = dict(table.schema())
    out: list[Diagnostic] = []
    for step in plan.steps:
        shape = _source_shape(step, plan)
        if isinstance(step.op, ExtremeKey):
            if shape != "map":
                out.append(Diagnostic(step.index, "RefTypeMismatch", "EXTREME_KEY needs a key-to-number result from an earlier step"))
        elif shape != "table":
            out.append(Diagnostic(step.index, "RefTypeMismatch", f"{step.op.NAME} needs a table source, REF({step.source.ref}) is not one"))
        if isinstance(step.op, LinRegPredict):
            ref_op = plan.steps[step.op.model_ref - 1].op
            if not isinstance(ref_op, LinRegFit):
                out.append(Diagnostic(step.index, "BadModelRef", f"model_ref={step.op.model_ref} does not point at a LINREG_FIT step"))
        _check_columns(step, dtypes, out)
    return out


GRAMMAR_DOC = """\
PLAN    := STEP+
STEP    := "Step " N ": " RATIONALE NEWLINE "OP: " CALL " ON " SOURCE
CALL    := OP_NAME "(" [ARG ("," ARG)*] ")"
ARG     := KEY "=" VALUE
SOURCE  := "TABLE" | "REF(" N ")"
VALUE   := NUMBER | IDENT | QUOTED | PREDICATE      (depends on the argument)
PRED    := CMP (("AND" | "OR") CMP)*                (evaluated left to right)
CMP     := COLUMN ("==" | "!=" | ">" | ">=" | "<" | "<=") (NUMBER | QUOTED)
"""

FORMAT_RULES_DOC = """\
- Number steps from 1, consecutively. Each step is exactly two lines.
- REF(i) and model_ref may only point at earlier steps.
- Strings are double-quoted; numbers and option words (mean, max, asc, ...) are bare.
- Use only the operations listed above, spelled exactly as shown.
- Do not compute the answer yourself and do not add prose outside the steps.
"""

OP_CATALOG_DOC = """\
COUNT_ROWS() -> number of rows
COUNT_COLS() -> number of columns
COLUMNS() -> list of column names
DTYPES() -> list of "name=dtype" entries (dtype is Numeric or Categorical)
HEAD(n=N) -> table with the first N rows
COUNT_MISSING(col=C) -> number of missing cells in column C
COUNT_MISSING_ALL() -> map of column name to missing-cell count
STAT(col=C, kind=K) -> one statistic of column C; K is one of mean, median,
  mode, std, var, min, max, sum, range, nunique (std and var are sample
  forms; mode returns all modal values sorted ascending)
VALUE_COUNTS(col=C) -> map of value to occurrence count
TOP_VALUE(col=C) -> most frequent value in C (ties break alphabetically)
CORR(x=X, y=Y) -> Pearson correlation of numeric columns X and Y over rows
  where both are present
FILTER(pred=P) -> table with the rows satisfying P; rows with a missing
  compared cell never satisfy a comparison
GROUP_AGG(by=B, target=T, agg=A) -> map of group key to aggregate of T;
  A is one of mean, sum, count, min, max (count counts rows per group)
SORT_TOP(col=C, k=K, order=O, return_col=R) -> list of R values (default C)
  from the top K rows when sorted by C; O is asc or desc; rows missing C
  or R are skipped; ties keep original row order
ARG_EXTREME(col=C, mode=M, return_col=R) -> value of R in the first row
  where numeric column C attains its max (M=max) or min (M=min)
EXTREME_KEY(mode=M, strict_positive=B) -> key(s) with the largest (M=max)
  or smallest (M=min) value in a map result; strict_positive=true first
  drops entries <= 0; ties return all keys sorted ascending
LINREG_FIT(x=X, y=Y) -> least-squares line predicting Y from X
LINREG_PREDICT(model_ref=N, x0=V) -> prediction at V from the line fit in
  step N
"""
