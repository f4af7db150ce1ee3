"""Suite manifests and the end-to-end benchmark loop.

A manifest is a JSON file naming datasets (CSV paths relative to the
manifest) and cases (question, ground truth, metadata). run_suite pushes
every case through the full pipeline: generate a plan from the backend,
execute it, grade the final value. Failures never abort the run; they
become incorrect verdicts whose reasons carry a stage label:

* generation-error: no usable plan came back within the retry budget
* budget-error: the prompt could not fit the token budget
* backend-error: the backend itself failed (network, script, cassette)
* execution-error: the plan died on the data at run time
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..backends import Backend, BackendError
from ..checker import GroundTruth, check_answer
from ..executor import ExecutionError, execute_plan
from ..planner import PlannerConfig, PlanRejected, generate_plan
from ..profile import BudgetTooSmall
from ..table import ColumnarTable, load_csv, size_category
from .report import CaseResult

VALID_SIZES = ("Small", "Medium", "Large")


class SuiteError(Exception):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    id: str
    path: Path
    size: str


@dataclass(frozen=True)
class CaseSpec:
    id: str
    dataset: str
    question: str
    difficulty: str
    order_insensitive: bool
    truth: GroundTruth


@dataclass(frozen=True)
class Suite:
    datasets: tuple[DatasetSpec, ...]
    cases: tuple[CaseSpec, ...]
    root: Path


def load_suite(path: str | Path) -> Suite:
    """Parse and cross-check a manifest; bad references fail loudly here."""
    manifest_path = Path(path)
    try:
        data = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise SuiteError(f"cannot read manifest {manifest_path}: {exc}") from exc
    root = manifest_path.parent

    datasets = []
    seen_ids: set[str] = set()
    for entry in data.get("datasets", []):
        if entry["id"] in seen_ids:
            raise SuiteError(f"duplicate dataset id {entry['id']!r}")
        seen_ids.add(entry["id"])
        if entry["size"] not in VALID_SIZES:
            raise SuiteError(f"dataset {entry['id']!r} has unknown size {entry['size']!r}")
        datasets.append(DatasetSpec(entry["id"], root / entry["path"], entry["size"]))
    if not datasets:
        raise SuiteError("manifest declares no datasets")

    cases = []
    seen_cases: set[str] = set()
    for entry in data.get("cases", []):
        if entry["id"] in seen_cases:
            raise SuiteError(f"duplicate case id {entry['id']!r}")
        seen_cases.add(entry["id"])
        if entry["dataset"] not in seen_ids:
            raise SuiteError(f"case {entry['id']!r} names unknown dataset {entry['dataset']!r}")
        order_insensitive = bool(entry.get("order_insensitive", False))
        cases.append(
            CaseSpec(
                id=entry["id"],
                dataset=entry["dataset"],
                question=entry["question"],
                difficulty=entry.get("difficulty", "easy"),
                order_insensitive=order_insensitive,
                truth=GroundTruth.from_json(entry["truth"], order_insensitive),
            )
        )
    if not cases:
        raise SuiteError("manifest declares no cases")
    return Suite(tuple(datasets), tuple(cases), root)


def load_tables(suite: Suite) -> dict[str, ColumnarTable]:
    """Load every dataset once, checking the declared size labels."""
    tables: dict[str, ColumnarTable] = {}
    for spec in suite.datasets:
        table = load_csv(spec.path, name=spec.id)
        actual = size_category(table).value
        if actual != spec.size:
            raise SuiteError(
                f"dataset {spec.id!r} is declared {spec.size} but has "
                f"{table.row_count} rows ({actual})"
            )
        tables[spec.id] = table
    return tables


def run_case(
    table: ColumnarTable,
    case: CaseSpec,
    backend: Backend,
    config: PlannerConfig,
) -> tuple[bool, str]:
    try:
        generation = generate_plan(backend, table, case.question, config)
    except BudgetTooSmall as exc:
        return False, f"budget-error: {exc}"
    except PlanRejected as exc:
        return False, f"generation-error: {exc}"
    except BackendError as exc:
        return False, f"backend-error: {exc}"
    try:
        execution = execute_plan(generation.plan, table)
    except ExecutionError as exc:
        return False, f"execution-error: {exc}"
    verdict = check_answer(execution.final, case.truth)
    return verdict.correct, verdict.reason


def run_suite(
    suite: Suite,
    backend: Backend,
    config: PlannerConfig | None = None,
) -> list[CaseResult]:
    config = config or PlannerConfig()
    tables = load_tables(suite)
    sizes = {spec.id: spec.size for spec in suite.datasets}
    results = []
    for case in suite.cases:
        correct, reason = run_case(tables[case.dataset], case, backend, config)
        results.append(CaseResult(case.id, sizes[case.dataset], correct, reason))
    return results
