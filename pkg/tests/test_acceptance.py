"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single ``[acceptance] <label>: PASS|FAIL`` line so the
whole gate can be read off a terminal at a glance. The assertions inside
are the authoritative form of each guarantee; the unit suites pin the
same behavior in finer grain.
"""

import math
import socket
import time

import pytest

from parity import make_table, parity_mismatches
from tabletalk.backends import ScriptedBackend, ScriptRule
from tabletalk.bench import (
    edges_gold_rules_path,
    edges_manifest_path,
    mini_gold_rules_path,
    mini_manifest_path,
)
from tabletalk.bench.report import BucketScore, CaseResult, aggregate, dump_json, render_text
from tabletalk.bench.suite import load_suite, load_tables, run_suite
from tabletalk.checker import GroundTruth, check_answer
from tabletalk.dsl import parse_plan
from tabletalk.executor import (
    ExecutionError,
    InsufficientData,
    InvalidPlan,
    NoneOutcome,
    Number,
    execute_plan,
)
from tabletalk.planner import (
    DEFAULT_TOKEN_BUDGET,
    PlannerConfig,
    PlanRejected,
    RETRY_MARKER,
    build_prompt,
    generate_plan,
)
from tabletalk.profile import BudgetTooSmall, describe
from tabletalk.table import load_csv


def _report(label, capsys, check):
    try:
        check()
    except BaseException:
        with capsys.disabled():
            print(f"[acceptance] {label}: FAIL")
        raise
    with capsys.disabled():
        print(f"[acceptance] {label}: PASS")


def test_accuracy_report_arithmetic(capsys):
    def check():
        results = (
            [CaseResult(f"s{i}", "Small", i < 25) for i in range(75)]
            + [CaseResult(f"m{i}", "Medium", i < 22) for i in range(75)]
            + [CaseResult(f"l{i}", "Large", i < 27) for i in range(75)]
        )
        report = aggregate(results)
        assert report.small == BucketScore(25, 75)
        assert report.small.percent == 33.33
        assert report.medium.percent == 29.33
        assert report.large.percent == 36.0
        assert report.overall == BucketScore(74, 225)
        assert report.overall.percent == 32.89
        assert render_text(report) == (
            "Accuracy by dataset size\n"
            "  Small      25/75    33.33\n"
            "  Medium     22/75    29.33\n"
            "  Large      27/75    36.00\n"
            "Overall: 74/225, 32.89\n"
        )
        empty = aggregate([CaseResult("x", "Small", True)])
        assert empty.medium.percent is None
        assert "  Medium       0/0        -" in render_text(empty)

    _report("size-bucket accuracy arithmetic", capsys, check)


def test_executor_matches_reference_on_200_tables(capsys):
    def check():
        start = time.monotonic()
        for seed in range(200):
            mismatches = parity_mismatches(make_table(seed))
            assert mismatches == [], f"seed {seed}: {mismatches}"
        assert time.monotonic() - start < 60.0

    _report("executor matches brute-force reference across 200 seeded tables", capsys, check)


def test_scripted_benchmark_runs_offline(capsys, monkeypatch):
    def check():
        def forbidden(*args, **kwargs):
            raise AssertionError("network use is forbidden in this run")

        monkeypatch.setattr(socket, "socket", forbidden)
        monkeypatch.setattr(socket, "create_connection", forbidden)
        start = time.monotonic()
        suite = load_suite(mini_manifest_path())
        backend = ScriptedBackend.from_file(mini_gold_rules_path())
        report = aggregate(run_suite(suite, backend))
        elapsed = time.monotonic() - start
        assert report.overall == BucketScore(30, 30)
        assert render_text(report).endswith("Overall: 30/30, 100.00\n")
        assert elapsed < 10.0

    _report("scripted benchmark runs offline at full accuracy", capsys, check)


def test_margin_of_error_grading(capsys):
    def check():
        truth = GroundTruth("number", 100.0)  # default margin 1e-5, relative
        assert check_answer(Number(100.0 * (1 + 9.9e-6)), truth).correct
        assert not check_answer(Number(100.0 * (1 + 1.1e-5)), truth).correct
        # the bound is strict: exactly at the margin is already wrong
        assert not check_answer(Number(100.0 * (1 + 1e-5)), truth).correct

        exact = GroundTruth("number", 100.0, margin=0.0)
        assert check_answer(Number(100.0), exact).correct
        assert not check_answer(Number(math.nextafter(100.0, math.inf)), exact).correct

        zero = GroundTruth("number", 0.0)  # relative margin is meaningless at 0
        assert check_answer(Number(1e-10), zero).correct
        assert not check_answer(Number(1e-8), zero).correct

        verdict = check_answer(Number(100.01), truth)
        assert verdict.reason == "100.01 is outside the margin around 100"

    _report("relative-margin answer grading", capsys, check)


def test_degenerate_inputs_refuse_loudly(capsys):
    def check():
        suite = load_suite(edges_manifest_path())
        backend = ScriptedBackend.from_file(edges_gold_rules_path())
        results = {r.case_id: r for r in run_suite(suite, backend)}
        assert results["edge-median-categorical"].reason == (
            "generation-error: no valid plan after 3 attempts; last failure: "
            "step 1 DtypeMismatch: STAT kind=median needs a Numeric column, "
            "'Grade' is Categorical"
        )
        assert results["edge-most-missing"].reason == "no answer produced (no missing values)"
        assert not any(r.correct for r in results.values())

        table = load_tables(suite)["complete"]
        bad = parse_plan("Step 1: median of a text column\nOP: STAT(col=Grade, kind=median) ON TABLE\n")
        with pytest.raises(InvalidPlan):
            execute_plan(bad, table)

        gapless = parse_plan(
            "Step 1: tally missing cells\nOP: COUNT_MISSING_ALL() ON TABLE\n"
            "Step 2: pick the largest\nOP: EXTREME_KEY(mode=max, strict_positive=true) ON REF(1)\n"
        )
        outcome = execute_plan(gapless, table).final
        assert outcome == NoneOutcome("no missing values")
        graded = check_answer(outcome, GroundTruth("text", "Item"))
        assert (graded.correct, graded.reason) == (False, "no answer produced (no missing values)")

        starved = parse_plan(
            "Step 1: keep nothing\nOP: FILTER(pred=Score > 99999) ON TABLE\n"
            "Step 2: average the void\nOP: STAT(col=Score, kind=mean) ON REF(1)\n"
        )
        with pytest.raises(ExecutionError, match="step 2: STAT kind=mean on a table with no rows"):
            execute_plan(starved, table)

        one_row = load_csv(b"x,y\n1,2\n", name="one")
        lonely = parse_plan("Step 1: correlate\nOP: CORR(x=x, y=y) ON TABLE\n")
        with pytest.raises(InsufficientData, match="CORR needs 2 complete pairs, found 1"):
            execute_plan(lonely, one_row)

    _report("degenerate inputs refuse loudly", capsys, check)


def test_prompts_fit_token_budget(capsys):
    def check():
        suite = load_suite(mini_manifest_path())
        tables = load_tables(suite)
        config = PlannerConfig()
        assert config.token_budget == DEFAULT_TOKEN_BUDGET == 4096
        for case in suite.cases:
            bundle = build_prompt(describe(tables[case.dataset]), case.question, config)
            assert bundle.token_estimate <= config.token_budget, case.id
            assert bundle.background_level == 0, case.id

        # squeezing the budget walks the degradation ladder, then refuses
        profile = describe(tables["people"])
        question = "How many rows does the table have?"
        levels = []
        budget = DEFAULT_TOKEN_BUDGET
        while True:
            try:
                bundle = build_prompt(profile, question, PlannerConfig(token_budget=budget))
            except BudgetTooSmall as exc:
                assert exc.budget == budget
                assert exc.needed > budget
                break
            levels.append(bundle.background_level)
            budget = bundle.token_estimate - 1
        assert levels == sorted(levels)
        assert levels[0] == 0
        assert len(set(levels)) == len(levels) >= 3

    _report("prompts fit the token budget by degrading", capsys, check)


def test_benchmark_reruns_identical(capsys):
    def check():
        def one_run() -> str:
            suite = load_suite(mini_manifest_path())
            backend = ScriptedBackend.from_file(mini_gold_rules_path())
            report = aggregate(run_suite(suite, backend))
            return dump_json(report) + "---" + render_text(report)

        assert one_run() == one_run()

    _report("benchmark reruns reproduce identical reports", capsys, check)


def test_plan_retries_bounded_with_feedback(capsys, cities_table):
    def check():
        good = (
            "Step 1: find the hottest row\n"
            "OP: ARG_EXTREME(col=Temp, mode=max, return_col=City) ON TABLE\n"
        )
        healing = ScriptedBackend(
            [ScriptRule(RETRY_MARKER, good)], default="not a plan at all"
        )
        generation = generate_plan(
            healing, cities_table, "Which City has the highest Temp?", PlannerConfig()
        )
        assert healing.calls == 2
        assert len(generation.attempts) == 2
        assert generation.attempts[0].failure.startswith("syntax:")
        assert generation.attempts[1].failure is None

        hopeless = ScriptedBackend([], default="still not a plan")
        with pytest.raises(PlanRejected) as excinfo:
            generate_plan(hopeless, cities_table, "Which City has the highest Temp?", PlannerConfig())
        assert hopeless.calls == 3  # 1 try + parse_retries(2)
        assert len(excinfo.value.attempts) == 3

        one_shot = ScriptedBackend([], default="nope")
        with pytest.raises(PlanRejected):
            generate_plan(
                one_shot,
                cities_table,
                "Which City has the highest Temp?",
                PlannerConfig(parse_retries=0),
            )
        assert one_shot.calls == 1

    _report("plan retries are bounded and carry feedback", capsys, check)
