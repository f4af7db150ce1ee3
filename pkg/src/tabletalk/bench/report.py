"""Benchmark scoring: size-bucketed accuracy plus per-case verdicts.

Percentages are rounded to two decimals, so 74 of 225 reports as 32.89.
A bucket with no cases has no percentage at all (null in JSON, a dash in
text) rather than a misleading zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

SIZES = ("Small", "Medium", "Large")


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    size: str
    correct: bool
    reason: str = ""


@dataclass(frozen=True)
class BucketScore:
    correct: int
    total: int

    @property
    def percent(self) -> float | None:
        if self.total == 0:
            return None
        return round(100.0 * self.correct / self.total, 2)


@dataclass(frozen=True)
class Report:
    small: BucketScore
    medium: BucketScore
    large: BucketScore
    overall: BucketScore
    cases: tuple[CaseResult, ...]

    def bucket(self, size: str) -> BucketScore:
        return {"Small": self.small, "Medium": self.medium, "Large": self.large}[size]


def aggregate(results: Sequence[CaseResult]) -> Report:
    by_size = {size: [0, 0] for size in SIZES}
    for r in results:
        if r.size not in by_size:
            raise ValueError(f"unknown size bucket {r.size!r}")
        by_size[r.size][1] += 1
        by_size[r.size][0] += int(r.correct)
    scores = {size: BucketScore(c, t) for size, (c, t) in by_size.items()}
    overall = BucketScore(
        sum(s.correct for s in scores.values()), sum(s.total for s in scores.values())
    )
    return Report(scores["Small"], scores["Medium"], scores["Large"], overall, tuple(results))


def _bucket_json(score: BucketScore) -> dict:
    return {"correct": score.correct, "total": score.total, "percent": score.percent}


def report_to_json(report: Report) -> dict:
    return {
        "small": _bucket_json(report.small),
        "medium": _bucket_json(report.medium),
        "large": _bucket_json(report.large),
        "overall": _bucket_json(report.overall),
        "cases": [
            {"case_id": c.case_id, "correct": c.correct, "reason": c.reason}
            for c in report.cases
        ],
    }


def dump_json(report: Report) -> str:
    return json.dumps(report_to_json(report), indent=2, sort_keys=True) + "\n"


def report_from_json(data: dict) -> Report:
    def bucket(obj: dict) -> BucketScore:
        return BucketScore(int(obj["correct"]), int(obj["total"]))

    cases = tuple(
        CaseResult(c["case_id"], "", bool(c["correct"]), c.get("reason", ""))
        for c in data.get("cases", [])
    )
    return Report(
        bucket(data["small"]),
        bucket(data["medium"]),
        bucket(data["large"]),
        bucket(data["overall"]),
        cases,
    )


def _pct_text(score: BucketScore) -> str:
    return "-" if score.percent is None else f"{score.percent:.2f}"


def render_text(report: Report) -> str:
    lines = ["Accuracy by dataset size"]
    for label in SIZES:
        score = report.bucket(label)
        frac = f"{score.correct}/{score.total}"
        lines.append(f"  {label:<8}{frac:>8}  {_pct_text(score):>7}")
    overall = report.overall
    lines.append(f"Overall: {overall.correct}/{overall.total}, {_pct_text(overall)}")
    return "\n".join(lines) + "\n"
