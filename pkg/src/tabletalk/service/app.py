"""HTTP service exposing the full pipeline.

Datasets are uploaded once and addressed by content id afterwards. Every
error body has the same shape, {"failure": {"kind", "detail"}}: malformed
requests come back as 400, unknown dataset ids as 404, and domain failures
(plan generation, budgets, execution) as 422 so clients can distinguish
"you called it wrong" from "the pipeline could not answer".
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..backends import BackendError
from ..checker import GroundTruth, check_answer
from ..config import AppConfig, build_backend
from ..executor import (
    ExecutionError,
    execute_plan,
    value_from_json,
    value_summary,
    value_to_json,
)
from ..planner import DEFAULT_TOKEN_BUDGET, PlanRejected, generate_plan
from ..profile import BudgetTooSmall, describe, fit_background
from ..table import LoadError, size_category
from ..tokens import estimate_tokens
from ..bench.report import aggregate, report_to_json
from ..bench.suite import SuiteError, load_suite, run_suite
from .registry import DatasetRegistry
from .schemas import (
    AnswerOut,
    BenchRequest,
    CheckRequest,
    CheckResponse,
    DatasetInfo,
    DatasetList,
    PlanStepOut,
    ProfileResponse,
    QueryRequest,
    QueryResponse,
)


def _failure(status: int, kind: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"failure": {"kind": kind, "detail": detail}})


def _clean_name(raw: str) -> str:
    name = raw.rsplit("/", 1)[-1].rsplit("\\", 1)[-1].strip()
    if name.lower().endswith(".csv"):
        name = name[:-4]
    return name or "dataset"


def _dataset_info(dataset_id: str, table) -> DatasetInfo:
    return DatasetInfo(
        id=dataset_id,
        name=table.name,
        rows=table.row_count,
        columns=len(table.columns),
        size=size_category(table).value,
    )


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    registry = DatasetRegistry()
    backend = build_backend(config)

    app = FastAPI(title="tabletalk", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _failure(400, "validation-error", str(exc.errors()))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/datasets", response_model=DatasetList)
    def list_datasets() -> DatasetList:
        infos = [_dataset_info(ds_id, table) for ds_id, table in registry.items()]
        return DatasetList(datasets=infos)

    @app.post("/datasets", response_model=DatasetInfo, status_code=201)
    async def upload_dataset(request: Request, lenient: bool = False):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            part = form.get("file")
            if part is None or isinstance(part, str):
                return _failure(400, "validation-error", "multipart upload needs a 'file' part")
            data = await part.read()
            raw_name = request.headers.get("x-dataset-name") or part.filename or "dataset"
        else:
            data = await request.body()
            raw_name = request.headers.get("x-dataset-name", "dataset")
        if not data:
            return _failure(400, "validation-error", "upload body is empty")
        try:
            dataset_id, table = registry.add_bytes(data, _clean_name(raw_name), lenient)
        except LoadError as exc:
            return _failure(400, "load-error", str(exc))
        return _dataset_info(dataset_id, table)

    @app.get("/datasets/{dataset_id}/profile", response_model=ProfileResponse)
    def dataset_profile(dataset_id: str, budget: int = DEFAULT_TOKEN_BUDGET):
        table = registry.get(dataset_id)
        if table is None:
            return _failure(404, "not-found", f"no dataset with id {dataset_id!r}")
        if budget < 1:
            return _failure(400, "validation-error", "budget must be a positive integer")
        try:
            text, level = fit_background(describe(table), budget)
        except BudgetTooSmall as exc:
            return _failure(422, "budget-error", str(exc))
        return ProfileResponse(
            id=dataset_id, profile=text, level=level, tokens=estimate_tokens(text)
        )

    @app.post("/query", response_model=QueryResponse)
    def query(req: QueryRequest):
        table = registry.get(req.dataset_id)
        if table is None:
            return _failure(404, "not-found", f"no dataset with id {req.dataset_id!r}")
        planner_config = config.planner
        if req.budget is not None:
            planner_config = replace(planner_config, token_budget=req.budget)
        try:
            generation = generate_plan(backend, table, req.question, planner_config)
        except BudgetTooSmall as exc:
            return _failure(422, "budget-error", str(exc))
        except PlanRejected as exc:
            return _failure(422, "generation-error", str(exc))
        except BackendError as exc:
            return _failure(422, "backend-error", str(exc))
        try:
            execution = execute_plan(generation.plan, table)
        except ExecutionError as exc:
            return _failure(422, "execution-error", str(exc))
        steps = [
            PlanStepOut(
                index=record.index,
                rationale=step.rationale,
                op=record.op_text,
                result=value_summary(record.result),
            )
            for step, record in zip(generation.plan.steps, execution.records)
        ]
        return QueryResponse(
            dataset_id=req.dataset_id,
            plan=steps,
            answer=AnswerOut(**value_to_json(execution.final)),
            answer_text=value_summary(execution.final),
        )

    @app.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest):
        try:
            predicted = value_from_json(req.predicted.model_dump())
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            return _failure(400, "validation-error", f"bad predicted value: {exc}")
        margin = req.truth.margin if req.truth.margin is not None else config.margin
        payload = {"kind": req.truth.kind, "value": req.truth.value, "margin": margin}
        try:
            truth = GroundTruth.from_json(payload, req.order_insensitive)
            verdict = check_answer(predicted, truth)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            return _failure(400, "validation-error", f"bad ground truth: {exc}")
        return CheckResponse(correct=verdict.correct, reason=verdict.reason)

    @app.post("/bench/run")
    def bench_run(req: BenchRequest):
        manifest = Path(req.manifest_path)
        try:
            suite = load_suite(manifest)
            results = run_suite(suite, backend, config.planner)
        except (SuiteError, LoadError) as exc:
            return _failure(400, "suite-error", str(exc))
        return report_to_json(aggregate(results))

    return app
