import pytest

from tabletalk.backends import CompletionParams, ScriptedBackend, ScriptRule
from tabletalk.dsl import CountRows, Stat
from tabletalk.planner import (
    RETRY_MARKER,
    PlannerConfig,
    PlanRejected,
    build_prompt,
    generate_plan,
)
from tabletalk.profile import BudgetTooSmall, describe
from tabletalk.tokens import estimate_tokens

GOOD_PLAN = "Step 1: just count\nOP: COUNT_ROWS() ON TABLE\n"
MEAN_PLAN = "Step 1: average the column\nOP: STAT(col=Temp, kind=mean) ON TABLE\n"


class PromptLog:
    """Backend that always answers the same text and keeps every prompt."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.prompts = []

    def complete(self, prompt: str, params: CompletionParams) -> str:
        self.prompts.append(prompt)
        if len(self.responses) > 1:
            return self.responses.pop(0)
        return self.responses[0]


class TestBuildPrompt:
    def test_sections_appear_in_order(self, cities_table):
        bundle = build_prompt(
            describe(cities_table), "How many rows?", PlannerConfig()
        )
        text = bundle.text
        positions = [
            text.index("=== SITUATION CONTEXT ==="),
            text.index("=== DESIRED RESPONSE ACTION ==="),
            text.index("=== DECLARED CAPABILITIES ==="),
            text.index("=== STIPULATED NEEDS ==="),
        ]
        assert positions == sorted(positions)
        assert "Question: How many rows?" in text
        assert "Use at most 8 steps." in text
        assert "COUNT_ROWS() -> number of rows" in text
        assert "PLAN    := STEP+" in text

    def test_background_is_embedded(self, cities_table):
        bundle = build_prompt(describe(cities_table), "q", PlannerConfig())
        assert bundle.background_level == 0
        assert "[background v1] dataset cities:" in bundle.text
        assert "head (5 rows):" in bundle.text
        assert bundle.token_estimate == estimate_tokens(bundle.text)
        assert bundle.token_estimate <= PlannerConfig().token_budget

    def test_prior_context_rides_in_the_first_section(self, cities_table):
        bundle = build_prompt(
            describe(cities_table),
            "q",
            PlannerConfig(),
            prior_context="earlier answer: 9",
        )
        text = bundle.text
        assert text.index("=== SITUATION CONTEXT ===") < text.index(
            "earlier answer: 9"
        ) < text.index("=== DESIRED RESPONSE ACTION ===")

    def test_budget_degrades_background(self, cities_table):
        profile = describe(cities_table)
        full = build_prompt(profile, "q", PlannerConfig())
        tight = PlannerConfig(token_budget=full.token_estimate - 1)
        bundle = build_prompt(profile, "q", tight)
        assert bundle.background_level >= 1
        assert "head (5 rows):" not in bundle.text
        assert bundle.token_estimate <= tight.token_budget

    def test_budget_too_small_reports_need(self, cities_table):
        with pytest.raises(BudgetTooSmall) as err:
            build_prompt(describe(cities_table), "q", PlannerConfig(token_budget=50))
        assert err.value.budget == 50
        assert err.value.needed > 50


class TestGeneratePlan:
    def test_single_clean_attempt(self, cities_table):
        backend = PromptLog([GOOD_PLAN])
        generation = generate_plan(backend, cities_table, "How many rows?")
        assert generation.plan.steps[0].op == CountRows()
        assert len(generation.attempts) == 1
        assert generation.attempts[0].failure is None
        assert RETRY_MARKER not in backend.prompts[0]

    def test_rejection_feedback_reaches_the_backend(self, cities_table):
        backend = PromptLog(["not a plan at all", MEAN_PLAN])
        generation = generate_plan(backend, cities_table, "What is the mean Temp?")
        assert generation.plan.steps[0].op == Stat(col="Temp", kind="mean")
        assert [a.failure is None for a in generation.attempts] == [False, True]
        assert "syntax:" in generation.attempts[0].failure
        retry = backend.prompts[1]
        assert retry.startswith(backend.prompts[0])
        assert RETRY_MARKER in retry
        assert "Your previous plan was rejected: syntax:" in retry
        assert "Rewrite the complete plan" in retry

    def test_validation_failures_are_reported_with_step(self, cities_table):
        bad = "Step 1: x\nOP: STAT(col=Ghost, kind=mean) ON TABLE\n"
        backend = PromptLog([bad, GOOD_PLAN])
        generation = generate_plan(backend, cities_table, "q")
        assert "step 1 UnknownColumn" in generation.attempts[0].failure

    def test_step_limit_is_enforced(self, cities_table):
        long_plan = "".join(
            f"Step {i}: x\nOP: COUNT_ROWS() ON TABLE\n" for i in range(1, 4)
        )
        backend = PromptLog([long_plan, GOOD_PLAN])
        config = PlannerConfig(max_steps=2)
        generation = generate_plan(backend, cities_table, "q", config)
        assert generation.attempts[0].failure == "plan has 3 steps, limit is 2"

    def test_gives_up_after_retries(self, cities_table):
        backend = PromptLog(["garbage"])
        with pytest.raises(PlanRejected) as err:
            generate_plan(backend, cities_table, "q", PlannerConfig(parse_retries=2))
        assert len(err.value.attempts) == 3
        assert str(err.value).startswith("no valid plan after 3 attempts")
        assert len(backend.prompts) == 3
        assert all(RETRY_MARKER in p for p in backend.prompts[1:])

    def test_zero_retries_is_one_shot(self, cities_table):
        backend = PromptLog(["garbage"])
        with pytest.raises(PlanRejected) as err:
            generate_plan(backend, cities_table, "q", PlannerConfig(parse_retries=0))
        assert len(err.value.attempts) == 1

    def test_scripted_backend_end_to_end(self, cities_table):
        backend = ScriptedBackend(
            [ScriptRule(match="Question: How many rows", response=GOOD_PLAN)],
            default="nonsense",
        )
        generation = generate_plan(backend, cities_table, "How many rows does it have?")
        assert generation.plan.steps[0].op == CountRows()
        assert backend.calls == 1

    def test_budget_error_propagates_before_any_call(self, cities_table):
        backend = PromptLog([GOOD_PLAN])
        with pytest.raises(BudgetTooSmall):
            generate_plan(
                backend, cities_table, "q", PlannerConfig(token_budget=10)
            )
        assert backend.prompts == []
