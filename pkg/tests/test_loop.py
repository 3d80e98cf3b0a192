import random

import pytest

from rtlforge.agents.backend import ScriptBank, ScriptedBackend
from rtlforge.evaluation import EvalStage, EvaluationReport, FunctionalMismatch
from rtlforge.frontend.parse_errors import SyntaxIssue
from rtlforge.loop import (
    DialecticMode,
    FeedbackRoute,
    RunConfig,
    Verdict,
    optimize_design,
    route_feedback,
)

GOOD_FENCED = None  # populated from the convergence script


def _report(stage, syn=0, func=0, goals=False):
    report = EvaluationReport.__new__(EvaluationReport)
    report.syntax_errors = [SyntaxIssue(1, 1, f"e{i}") for i in range(syn)]
    report.warnings = []
    report.functional_mismatches = [
        FunctionalMismatch("y", i, "1", "0") for i in range(func)]
    report.ppa = None
    report.stage_reached = stage
    report.latency_shift = 0
    report.notes = []
    if goals:
        class _Goals:
            goals_met = True
        report.ppa = _Goals()
    return report


def test_route_priority_syntax_wins():
    # constructed contrary to the invariant on purpose: syntax still wins
    report = _report(EvalStage.SYNTAX, syn=1, func=2)
    assert route_feedback(report) is FeedbackRoute.SYNTAX


def test_route_ppa_when_clean_but_unmet():
    assert route_feedback(_report(EvalStage.COMPLETE)) is FeedbackRoute.PPA


def test_route_none_when_goals_met():
    assert route_feedback(_report(EvalStage.COMPLETE, goals=True)) is FeedbackRoute.NONE


def test_route_functional():
    assert route_feedback(_report(EvalStage.FUNCTIONAL, func=1)) is FeedbackRoute.FUNCTIONAL


# --- full runs over the bundled fixtures ---


def test_conformance_broken_wrong_correct(manifest, evaluator, convergence_script):
    t = manifest.by_id("mul8_pipe")
    backend = ScriptedBackend(convergence_script)
    outcome = optimize_design(t, RunConfig(goal=t.goal, max_iters=8),
                              backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.SUCCESS
    assert [r.value for r in outcome.routes()] == ["SYNTAX", "FUNCTIONAL", "NONE"]
    last = outcome.iterations[-1]
    assert last.plan_revision == 2
    assert last.hypothesis_revision == 1
    # line-10 clearing invariant on every report
    for rec in outcome.iterations:
        if rec.report.syntax_errors:
            assert not rec.report.functional_mismatches
            assert rec.report.ppa is None


def test_always_broken_exhausts_iterations(manifest, evaluator, convergence_script):
    t = manifest.by_id("mul8_pipe")
    broken = convergence_script["coder"][0]
    backend = ScriptedBackend({
        "articulator": [convergence_script["articulator"][0]] * 10,
        "hypothesis": [convergence_script["hypothesis"][0]] * 10,
        "coder": [broken] * 10,
    })
    outcome = optimize_design(t, RunConfig(goal=t.goal, max_iters=3),
                              backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.FAIL_SYNTAX
    assert len(outcome.iterations) == 4  # initial generation + 3 refinements
    assert all(r is FeedbackRoute.SYNTAX for r in outcome.routes())


def test_immediate_success_single_record(manifest, evaluator, reference_script_path):
    t = manifest.by_id("gated_bank")
    backend = ScriptBank.load(reference_script_path).backend(t.id, 0)
    outcome = optimize_design(t, RunConfig(goal=t.goal), backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.SUCCESS
    assert len(outcome.iterations) == 1
    assert outcome.routes() == [FeedbackRoute.NONE]


def test_plan_revisions_match_routes(manifest, evaluator, convergence_script):
    t = manifest.by_id("mul8_pipe")
    backend = ScriptedBackend(convergence_script)
    outcome = optimize_design(t, RunConfig(goal=t.goal, max_iters=8),
                              backend, evaluator(t.clock))
    # every record but the last routed into an update branch
    last = outcome.iterations[-1]
    assert last.plan_revision == len(outcome.iterations) - 1
    functional_or_ppa = sum(
        1 for r in outcome.iterations[:-1]
        if r.route in (FeedbackRoute.FUNCTIONAL, FeedbackRoute.PPA))
    assert last.hypothesis_revision == functional_or_ppa


def test_disabled_mode_single_generation(manifest, evaluator, reference_script_path):
    t = manifest.by_id("mul8_pipe")
    bank = ScriptBank.load(reference_script_path)
    backend = bank.backend(t.id, 0)
    cfg = RunConfig(goal=t.goal, dialectic_mode=DialecticMode.DISABLED)
    outcome = optimize_design(t, cfg, backend, evaluator(t.clock))
    assert len(outcome.iterations) == 1
    assert outcome.verdict is Verdict.SUCCESS
    # no dialectic exchanges happened: only the coder cursor moved
    assert backend.cursors.get("articulator", 0) == 0
    assert backend.cursors.get("hypothesis", 0) == 0
    assert outcome.iterations[0].plan_revision == 0


def test_merged_mode_uses_single_dialectic_role(manifest, evaluator,
                                                reference_script_path):
    t = manifest.by_id("mul8_pipe")
    backend = ScriptBank.load(reference_script_path).backend(t.id, 0)
    cfg = RunConfig(goal=t.goal, dialectic_mode=DialecticMode.MERGED)
    outcome = optimize_design(t, cfg, backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.SUCCESS
    assert backend.cursors.get("dialectic", 0) == 1
    assert backend.cursors.get("articulator", 0) == 0


def test_backend_exhaustion_is_fail_backend(manifest, evaluator):
    t = manifest.by_id("mul8_pipe")
    backend = ScriptedBackend({})  # nothing scripted at all
    outcome = optimize_design(t, RunConfig(goal=t.goal), backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.FAIL_BACKEND
    assert outcome.notes


def test_best_so_far_kept_on_ppa_failure(manifest, evaluator, convergence_script):
    t = manifest.by_id("mul8_pipe")
    # correct candidate but an unreachable goal: loop exhausts, keeps the best
    goal = t.goal.with_overrides(min_timing_gain=99.0)
    good = convergence_script["coder"][2]
    backend = ScriptedBackend({
        "articulator": [convergence_script["articulator"][0]] * 6,
        "hypothesis": [convergence_script["hypothesis"][0]] * 6,
        "coder": [good] * 4,
    })
    outcome = optimize_design(t, RunConfig(goal=goal, max_iters=2),
                              backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.FAIL_PPA
    assert outcome.final_metrics is not None
    assert outcome.final_metrics.timing_gain > 0
    assert any("best-so-far" in n for n in outcome.notes)


def test_stop_on_regression(manifest, evaluator, convergence_script):
    t = manifest.by_id("mul8_pipe")
    goal = t.goal.with_overrides(min_timing_gain=99.0)
    good = convergence_script["coder"][2]
    backend = ScriptedBackend({
        "articulator": [convergence_script["articulator"][0]] * 12,
        "hypothesis": [convergence_script["hypothesis"][0]] * 12,
        "coder": [good] * 12,
    })
    cfg = RunConfig(goal=goal, max_iters=8, stop_on_regression=2)
    outcome = optimize_design(t, cfg, backend, evaluator(t.clock))
    assert len(outcome.iterations) < 9
    assert any("non-improving" in n for n in outcome.notes)


def test_bounded_iterations_under_adversarial_scripts(manifest, evaluator,
                                                      convergence_script):
    rng = random.Random(3)
    t = manifest.by_id("mul8_pipe")
    pieces = [convergence_script["coder"][0], convergence_script["coder"][1],
              "no code at all", convergence_script["coder"][2]]
    for trial in range(6):
        cap = rng.randint(1, 4)
        backend = ScriptedBackend({
            "articulator": [convergence_script["articulator"][0]] * 20,
            "hypothesis": [convergence_script["hypothesis"][0]] * 20,
            "coder": [rng.choice(pieces) for _ in range(20)],
        })
        outcome = optimize_design(t, RunConfig(goal=t.goal, max_iters=cap),
                                  backend, evaluator(t.clock))
        assert len(outcome.iterations) <= cap + 1


def test_route_replay_is_pure(manifest, evaluator, convergence_script):
    t = manifest.by_id("mul8_pipe")
    backend = ScriptedBackend(convergence_script)
    outcome = optimize_design(t, RunConfig(goal=t.goal), backend, evaluator(t.clock))
    replayed = [route_feedback(rec.report) for rec in outcome.iterations]
    assert replayed == outcome.routes()


def test_zero_examples_disables_injection(manifest, evaluator, reference_script_path):
    t = manifest.by_id("mul8_pipe")
    backend = ScriptBank.load(reference_script_path).backend(t.id, 0)
    cfg = RunConfig(goal=t.goal, k_examples=0)
    outcome = optimize_design(t, cfg, backend, evaluator(t.clock))
    assert outcome.verdict is Verdict.SUCCESS
    assert "Example 1" not in outcome.iterations[0].prompt
