"""Answer checking against typed ground truths.

Numbers match within a relative margin of error (default 0.001%, strictly
less than); a margin of exactly 0 demands equality, and a ground truth of 0
falls back to a tiny absolute window since a relative margin has no meaning
there. Text matches after whitespace collapsing and case folding. Lists
match element by element, optionally after sorting when the question does
not fix an order. A mismatch in answer shape (text where a number was
expected, and so on) is an incorrect verdict with a reason, never an error:
the checker's job is to grade, not to crash.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .backends import Backend, CompletionParams
from .executor import (
    KeyNumberMap,
    NoneOutcome,
    Number,
    NumberList,
    Text,
    TextList,
    Value,
    value_kind,
    value_summary,
)
from .table import format_number

DEFAULT_MARGIN = 1e-5
ZERO_TRUTH_WINDOW = 1e-9


@dataclass(frozen=True)
class GroundTruth:
    kind: str  # number | text | number_list | text_list | map | multipart
    value: object
    margin: float = DEFAULT_MARGIN
    order_insensitive: bool = False

    @classmethod
    def from_json(cls, obj: dict, order_insensitive: bool = False) -> "GroundTruth":
        kind = obj["kind"]
        value = obj["value"]
        if kind == "multipart":
            value = tuple(cls.from_json(part, order_insensitive) for part in value)
        elif kind == "map":
            value = {str(k): float(v) for k, v in value.items()}
        elif kind == "number":
            value = float(value)
        elif kind == "number_list":
            value = tuple(float(v) for v in value)
        elif kind == "text_list":
            value = tuple(str(v) for v in value)
        return cls(
            kind=kind,
            value=value,
            margin=float(obj.get("margin", DEFAULT_MARGIN)),
            order_insensitive=order_insensitive,
        )


@dataclass(frozen=True)
class Verdict:
    correct: bool
    reason: str = ""


def normalize_text(text: str) -> str:
    return " ".join(text.split()).casefold()


def within_margin(predicted: float, truth: float, margin: float) -> bool:
    if margin == 0:
        return predicted == truth
    if truth == 0:
        return abs(predicted) < ZERO_TRUTH_WINDOW
    return abs(predicted - truth) / abs(truth) < margin


def _check_number(predicted: Value, truth: GroundTruth) -> Verdict:
    if not isinstance(predicted, Number):
        return Verdict(False, f"expected a number, got {value_kind(predicted)}")
    if within_margin(predicted.value, truth.value, truth.margin):
        return Verdict(True)
    return Verdict(
        False,
        f"{format_number(predicted.value)} is outside the margin around "
        f"{format_number(truth.value)}",
    )


def _check_text(predicted: Value, truth: GroundTruth) -> Verdict:
    if not isinstance(predicted, Text):
        return Verdict(False, f"expected text, got {value_kind(predicted)}")
    if normalize_text(predicted.value) == normalize_text(truth.value):
        return Verdict(True)
    return Verdict(False, f"{predicted.value!r} does not match {truth.value!r}")


def _check_number_list(predicted: Value, truth: GroundTruth) -> Verdict:
    if not isinstance(predicted, NumberList):
        return Verdict(False, f"expected a list of numbers, got {value_kind(predicted)}")
    got = list(predicted.values)
    want = list(truth.value)
    if len(got) != len(want):
        return Verdict(False, f"expected {len(want)} numbers, got {len(got)}")
    if truth.order_insensitive:
        got, want = sorted(got), sorted(want)
    for g, w in zip(got, want):
        if not within_margin(g, w, truth.margin):
            return Verdict(
                False,
                f"{format_number(g)} is outside the margin around {format_number(w)}",
            )
    return Verdict(True)


def _check_text_list(predicted: Value, truth: GroundTruth) -> Verdict:
    if not isinstance(predicted, TextList):
        return Verdict(False, f"expected a list of names, got {value_kind(predicted)}")
    got = [normalize_text(v) for v in predicted.values]
    want = [normalize_text(v) for v in truth.value]
    if len(got) != len(want):
        return Verdict(False, f"expected {len(want)} entries, got {len(got)}")
    if truth.order_insensitive:
        got, want = sorted(got), sorted(want)
    for g, w in zip(got, want):
        if g != w:
            return Verdict(False, f"{g!r} does not match {w!r}")
    return Verdict(True)


def _check_map(predicted: Value, truth: GroundTruth) -> Verdict:
    if not isinstance(predicted, KeyNumberMap):
        return Verdict(False, f"expected a key-to-number map, got {value_kind(predicted)}")
    got = {normalize_text(k): v for k, v in predicted.entries}
    want = {normalize_text(k): v for k, v in truth.value.items()}
    if set(got) != set(want):
        missing = sorted(set(want) - set(got))
        extra = sorted(set(got) - set(want))
        detail = []
        if missing:
            detail.append("missing keys " + ", ".join(missing))
        if extra:
            detail.append("unexpected keys " + ", ".join(extra))
        return Verdict(False, "; ".join(detail))
    for key in want:
        if not within_margin(got[key], want[key], truth.margin):
            return Verdict(
                False,
                f"value for {key!r} is {format_number(got[key])}, outside the "
                f"margin around {format_number(want[key])}",
            )
    return Verdict(True)


def _check_multipart(predicted, truth: GroundTruth) -> Verdict:
    parts = truth.value
    if isinstance(predicted, (list, tuple)):
        values = list(predicted)
    else:
        values = [predicted]
    if len(values) != len(parts):
        return Verdict(
            False, f"expected {len(parts)} answer parts, got {len(values)}"
        )
    for i, (value, part) in enumerate(zip(values, parts), 1):
        verdict = check_answer(value, part)
        if not verdict.correct:
            return Verdict(False, f"part {i}: {verdict.reason}")
    return Verdict(True)


def check_answer(predicted, truth: GroundTruth) -> Verdict:
    """Grade a predicted value (or sequence of values for multipart truths)."""
    if truth.kind != "multipart" and isinstance(predicted, (list, tuple)):
        if len(predicted) != 1:
            return Verdict(False, f"expected one answer, got {len(predicted)}")
        predicted = predicted[0]
    if isinstance(predicted, NoneOutcome):
        return Verdict(False, f"no answer produced ({predicted.reason})")
    checks = {
        "number": _check_number,
        "text": _check_text,
        "number_list": _check_number_list,
        "text_list": _check_text_list,
        "map": _check_map,
        "multipart": _check_multipart,
    }
    if truth.kind not in checks:
        raise ValueError(f"unknown ground truth kind {truth.kind!r}")
    return checks[truth.kind](predicted, truth)


def render_truth(truth: GroundTruth) -> str:
    if truth.kind == "number":
        return format_number(truth.value)
    if truth.kind == "text":
        return str(truth.value)
    if truth.kind == "multipart":
        return "; ".join(render_truth(p) for p in truth.value)
    if truth.kind == "map":
        return json.dumps(truth.value, sort_keys=True)
    return json.dumps(list(truth.value))


JUDGE_PROMPT = """\
You are grading an answer to a data question.
Question: {question}
Reference answer: {truth}
Candidate answer: {predicted}
Reply with exactly one word on the first line: CORRECT or INCORRECT.
"""


def llm_judge(
    backend: Backend,
    question: str,
    predicted: Value,
    truth: GroundTruth,
    params: CompletionParams | None = None,
) -> Verdict:
    """Ask a backend to grade; fall back to check_answer if it won't say."""
    prompt = JUDGE_PROMPT.format(
        question=question,
        truth=render_truth(truth),
        predicted=value_summary(predicted),
    )
    completion = backend.complete(prompt, params or CompletionParams(model="judge"))
    first = completion.strip().split()[0].upper().strip(".,:;!") if completion.strip() else ""
    if first == "CORRECT":
        return Verdict(True)
    if first == "INCORRECT":
        return Verdict(False, "judged incorrect")
    fallback = check_answer(predicted, truth)
    note = "judge unparseable, graded directly"
    reason = f"{fallback.reason}; {note}" if fallback.reason else note
    return Verdict(fallback.correct, reason)
