"""Prompt construction and plan generation.

A prompt has four fixed sections, in this order:

1. SITUATION CONTEXT    -- the dataset background (richest level that fits)
2. DESIRED RESPONSE ACTION -- the question and what kind of reply is wanted
3. DECLARED CAPABILITIES   -- the operation catalog, verbatim
4. STIPULATED NEEDS        -- the reply grammar and format rules, verbatim

The whole prompt must fit the token budget. If the full background pushes it
over, build_prompt retries with progressively leaner background levels; when
even the schema-only level cannot fit, the budget itself is the problem and
BudgetTooSmall propagates to the caller.

generate_plan asks the backend for a completion and insists on a plan that
parses, stays within the step limit, and passes static validation. Each
rejection is fed back to the backend (marked with RETRY_MARKER) up to
parse_retries times; after that PlanRejected reports every attempt.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import Backend, CompletionParams
from .dsl import (
    FORMAT_RULES_DOC,
    GRAMMAR_DOC,
    OP_CATALOG_DOC,
    Plan,
    PlanSyntaxError,
    parse_plan,
    validate_plan,
)
from .profile import MAX_LEVEL, BudgetTooSmall, DatasetProfile, describe, render_level
from .table import ColumnarTable
from .tokens import estimate_tokens

DEFAULT_TOKEN_BUDGET = 4096
DEFAULT_MAX_COMPLETION_TOKENS = 1024

RETRY_MARKER = "=== PREVIOUS ATTEMPT FAILED ==="


@dataclass(frozen=True)
class PlannerConfig:
    model_name: str = "scripted"
    temperature: float = 0.0
    token_budget: int = DEFAULT_TOKEN_BUDGET
    max_steps: int = 8
    parse_retries: int = 2


@dataclass(frozen=True)
class PromptBundle:
    text: str
    background_level: int
    token_estimate: int


@dataclass(frozen=True)
class Attempt:
    completion: str
    failure: str | None


@dataclass(frozen=True)
class PlanGeneration:
    plan: Plan
    attempts: tuple[Attempt, ...]


class PlanRejected(Exception):
    """Every completion was unusable; carries the full attempt history."""

    def __init__(self, attempts: tuple[Attempt, ...]):
        self.attempts = attempts
        super().__init__(
            f"no valid plan after {len(attempts)} attempts; "
            f"last failure: {attempts[-1].failure}"
        )


def _assemble(background: str, question: str, max_steps: int, prior_context: str | None) -> str:
    parts = ["=== SITUATION CONTEXT ===", background.rstrip()]
    if prior_context:
        parts.append(prior_context.rstrip())
    parts += [
        "=== DESIRED RESPONSE ACTION ===",
        f"Question: {question}",
        "Write a step plan that a deterministic interpreter will run to answer",
        f"the question. Use at most {max_steps} steps.",
        "=== DECLARED CAPABILITIES ===",
        OP_CATALOG_DOC.rstrip(),
        "=== STIPULATED NEEDS ===",
        "Reply with plan text only, in exactly this grammar:",
        GRAMMAR_DOC.rstrip(),
        FORMAT_RULES_DOC.rstrip(),
    ]
    return "\n".join(parts) + "\n"


def build_prompt(
    profile: DatasetProfile,
    question: str,
    config: PlannerConfig,
    prior_context: str | None = None,
) -> PromptBundle:
    """The richest prompt whose token estimate fits config.token_budget."""
    for level in range(MAX_LEVEL + 1):
        text = _assemble(render_level(profile, level), question, config.max_steps, prior_context)
        estimate = estimate_tokens(text)
        if estimate <= config.token_budget:
            return PromptBundle(text, level, estimate)
    leanest = _assemble(render_level(profile, MAX_LEVEL), question, config.max_steps, prior_context)
    raise BudgetTooSmall(estimate_tokens(leanest), config.token_budget)


def _vet(completion: str, table: ColumnarTable, config: PlannerConfig) -> tuple[Plan | None, str | None]:
    try:
        plan = parse_plan(completion)
    except PlanSyntaxError as exc:
        return None, f"syntax: {exc}"
    if len(plan.steps) > config.max_steps:
        return None, f"plan has {len(plan.steps)} steps, limit is {config.max_steps}"
    diagnostics = validate_plan(plan, table)
    if diagnostics:
        return None, "; ".join(
            f"step {d.step_index} {d.kind}: {d.message}" for d in diagnostics
        )
    return plan, None


def generate_plan(
    backend: Backend,
    table: ColumnarTable,
    question: str,
    config: PlannerConfig | None = None,
    prior_context: str | None = None,
) -> PlanGeneration:
    """Prompt, vet, retry with feedback; the returned plan is runnable."""
    config = config or PlannerConfig()
    bundle = build_prompt(describe(table), question, config, prior_context)
    params = CompletionParams(
        model=config.model_name,
        temperature=config.temperature,
        max_tokens=DEFAULT_MAX_COMPLETION_TOKENS,
    )
    prompt = bundle.text
    attempts: list[Attempt] = []
    for _ in range(config.parse_retries + 1):
        completion = backend.complete(prompt, params)
        plan, failure = _vet(completion, table, config)
        attempts.append(Attempt(completion, failure))
        if plan is not None:
            return PlanGeneration(plan, tuple(attempts))
        prompt = (
            f"{bundle.text}\n{RETRY_MARKER}\n"
            f"Your previous plan was rejected: {failure}\n"
            "Rewrite the complete plan, fixing that problem.\n"
        )
    raise PlanRejected(tuple(attempts))
