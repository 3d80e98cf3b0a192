"""The closed optimization loop: dialectic state, generation, evaluation,
and feedback routing until goals are met or the iteration cap is hit.

Control flow: initialize the plan and hypotheses, extract the dataflow
graph, compose the prompt, generate, evaluate; then, while anything is
unsatisfied and iterations remain, route the report (syntax beats
functional beats PPA), revise the matching agent state, and regenerate
from the original source with the revised prompt state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

from rtlforge.agents.backend import BackendUnavailable, ChatBackend, ScriptExhausted, make_exchange
from rtlforge.agents.coder import CandidateCode, NoCodeFound, generate_candidate
from rtlforge.agents.dialectic import (
    AgentConfig,
    HypothesisSet,
    TransformationPlan,
    articulator_assist,
    articulator_init,
    articulator_update,
    hypo_init,
    hypo_update,
    render_feedback,
)
from rtlforge.agents.injector import BankExample, compose_prompt, select_examples
from rtlforge.agents.protocol import (
    HypothesisParseError,
    PlanParseError,
    Prediction,
    parse_plan_lines,
    parse_prediction,
    parse_risks,
)
from rtlforge.evaluation import CodeEvaluator, EvalStage, EvaluationReport
from rtlforge.frontend.dfg import build_dataflow_graph
from rtlforge.frontend.parse_errors import FrontendError
from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.schema import serialize_dfg
from rtlforge.frontend.syntax import ModuleAst, VerilogSource
from rtlforge.goals import GoalSpec
from rtlforge.harness.dataset import DesignTriple

FALLBACK_SCHEMA = "GRAPH unavailable (frontend rejected the source)"


class DialecticMode(Enum):
    FULL = "full"
    MERGED = "merged"
    DISABLED = "off"


class FeedbackRoute(Enum):
    SYNTAX = "SYNTAX"
    FUNCTIONAL = "FUNCTIONAL"
    PPA = "PPA"
    NONE = "NONE"


class Verdict(Enum):
    SUCCESS = "SUCCESS"
    FAIL_SYNTAX = "FAIL_SYNTAX"
    FAIL_FUNCTIONAL = "FAIL_FUNCTIONAL"
    FAIL_PPA = "FAIL_PPA"
    FAIL_BACKEND = "FAIL_BACKEND"


@dataclass
class RunConfig:
    goal: GoalSpec
    max_iters: int = 8
    k_examples: int = 2
    seed: int = 0
    dialectic_mode: DialecticMode = DialecticMode.FULL
    token_budget: int = 8000
    stop_on_regression: int | None = None
    model_id: str = "default"
    temperature: float = 0.2

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.k_examples < 0:
            raise ValueError("k_examples must be >= 0")

    def agent_config(self) -> AgentConfig:
        return AgentConfig(model_id=self.model_id, temperature=self.temperature)


@dataclass
class IterationRecord:
    t: int
    plan_revision: int
    hypothesis_revision: int
    candidate_origin: str
    report: EvaluationReport
    route: FeedbackRoute
    wall_time: float = 0.0
    prompt: str = ""
    response: str = ""

    def summary(self) -> dict:
        """Deterministic subset (no wall clock) for benchmark reports."""
        return {
            "t": self.t,
            "plan_revision": self.plan_revision,
            "hypothesis_revision": self.hypothesis_revision,
            "candidate_origin": self.candidate_origin,
            "route": self.route.value,
            "stage_reached": self.report.stage_reached.value,
            "goals_met": self.report.goals_met,
        }

    def full_record(self) -> dict:
        out = self.summary()
        out.update({
            "wall_time": self.wall_time,
            "prompt": self.prompt,
            "response": self.response,
            "report": self.report.to_dict(),
        })
        return out


@dataclass
class RunOutcome:
    triple_id: str
    verdict: Verdict
    iterations: list[IterationRecord] = field(default_factory=list)
    final_candidate: CandidateCode | None = None
    final_metrics: object | None = None     # PpaAssessment
    seed: int = 0
    notes: list[str] = field(default_factory=list)

    def routes(self) -> list[FeedbackRoute]:
        return [r.route for r in self.iterations]

    def summary(self) -> dict:
        metrics = None
        if self.final_metrics is not None:
            metrics = {
                "area_ratio": round(self.final_metrics.area_ratio, 9),
                "timing_gain": round(self.final_metrics.timing_gain, 9),
                "power_gain": round(self.final_metrics.power_gain, 9),
                "latency_shift": self.final_metrics.latency_shift,
            }
        return {
            "triple_id": self.triple_id,
            "seed": self.seed,
            "verdict": self.verdict.value,
            "routes": [r.value for r in self.routes()],
            "iterations": [r.summary() for r in self.iterations],
            "final_metrics": metrics,
            "notes": list(self.notes),
        }


def route_feedback(report: EvaluationReport) -> FeedbackRoute:
    """Branch priority exactly as the loop's if/elif chain."""
    if report.syntax_errors:
        return FeedbackRoute.SYNTAX
    if report.functional_mismatches:
        return FeedbackRoute.FUNCTIONAL
    if not report.goals_met:
        return FeedbackRoute.PPA
    return FeedbackRoute.NONE


_MERGED_SYSTEM = (
    "You are a combined RTL planning and prediction agent. Produce both the "
    "transformation plan (STEP/ASSUME lines) and the outcome hypotheses "
    "(PREDICT/RISK lines) in one answer."
)


class _MergedDialectic:
    """Single-prompt variant: one exchange yields plan and hypotheses."""

    def __init__(self, backend: ChatBackend, config: AgentConfig):
        self.backend = backend
        self.config = config

    def init(self, c0: VerilogSource, goal: GoalSpec, schema: str,
             ) -> tuple[TransformationPlan, HypothesisSet]:
        user = (f"Optimization target: {goal.describe()}.\n\nDataflow graph:\n{schema}\n\n"
                f"Design source:\n{c0.text}\n\nProduce plan and hypotheses.")
        response = self.backend.complete(
            make_exchange(_MERGED_SYSTEM, user, self.config.model_id,
                          self.config.temperature),
            agent="dialectic", revision=0)
        steps, assumptions = parse_plan_lines(response, set())
        prediction = parse_prediction(response) or Prediction(0.0, 0.0, 1.0)
        if prediction.area_ratio is None:
            prediction = Prediction(prediction.timing_gain, prediction.power_gain, 1.0)
        plan = TransformationPlan(goal.kind, steps, assumptions)
        hypo = HypothesisSet(prediction, parse_risks(response, set()))
        return plan, hypo

    def update(self, plan: TransformationPlan, hypo: HypothesisSet, feedback,
               bump_hypo: bool) -> tuple[TransformationPlan, HypothesisSet]:
        revision = plan.revision + 1
        user = (f"Current plan:\n{plan.render()}\n\nCurrent hypotheses:\n{hypo.render()}\n\n"
                f"Feedback:\n{render_feedback(feedback)}\n\nRevise both.")
        response = self.backend.complete(
            make_exchange(_MERGED_SYSTEM, user, self.config.model_id,
                          self.config.temperature),
            agent="dialectic", revision=revision)
        steps, assumptions = parse_plan_lines(response, set())
        new_plan = TransformationPlan(plan.goal, steps, assumptions or plan.assumptions,
                                      revision=revision)
        new_hypo = hypo
        if bump_hypo:
            prediction = parse_prediction(response) or hypo.predicted
            new_hypo = HypothesisSet(
                prediction, hypo.risks + parse_risks(response, set()),
                revision=hypo.revision + 1,
                area_ratio_defaulted=hypo.area_ratio_defaulted,
                deviations=list(hypo.deviations))
        return new_plan, new_hypo


def _dfg_schema(c0: VerilogSource) -> tuple[str, ModuleAst | None]:
    try:
        ast = parse_module(c0)
        return serialize_dfg(build_dataflow_graph(ast)), ast
    except FrontendError:
        return FALLBACK_SCHEMA, None


def optimize_design(triple: DesignTriple, cfg: RunConfig, backend: ChatBackend,
                    evaluator: CodeEvaluator) -> RunOutcome:
    """One full optimization run over a design triple."""
    goal = cfg.goal
    agent_cfg = cfg.agent_config()
    outcome = RunOutcome(triple_id=triple.id, verdict=Verdict.FAIL_BACKEND, seed=cfg.seed)

    schema, ast = _dfg_schema(triple.unoptimized)
    examples: list[BankExample] = []
    if cfg.k_examples > 0 and ast is not None:
        try:
            examples = select_examples(triple.kind, ast, cfg.k_examples)
        except Exception as exc:
            outcome.notes.append(f"example selection skipped: {exc}")

    merged = (_MergedDialectic(backend, agent_cfg)
              if cfg.dialectic_mode is DialecticMode.MERGED else None)

    plan: TransformationPlan | None = None
    hypo: HypothesisSet | None = None
    best: tuple[float, CandidateCode, object] | None = None
    stagnant = 0

    def generate_and_evaluate(t: int) -> IterationRecord:
        started = time.monotonic()
        bundle = compose_prompt(plan, hypo, schema, triple.unoptimized, examples,
                                cfg.token_budget, kind=triple.kind)
        candidate = generate_candidate(backend, triple.unoptimized, bundle,
                                       agent_cfg, iteration=t)
        report = evaluator.evaluate(triple.unoptimized, candidate, triple.testbench, goal)
        record = IterationRecord(
            t=t,
            plan_revision=plan.revision if plan else 0,
            hypothesis_revision=hypo.revision if hypo else 0,
            candidate_origin=candidate.source.origin,
            report=report,
            route=route_feedback(report),
            wall_time=time.monotonic() - started,
            prompt=bundle.render(),
            response=candidate.raw_response,
        )
        outcome.iterations.append(record)
        nonlocal best, stagnant
        if report.ppa is not None:
            gain = report.ppa.primary_gain
            if best is None or gain > best[0]:
                best = (gain, candidate, report.ppa)
                stagnant = 0
            else:
                stagnant += 1
        outcome.final_candidate = candidate
        outcome.final_metrics = report.ppa
        return record

    try:
        if cfg.dialectic_mode is DialecticMode.FULL:
            plan = articulator_init(backend, triple.unoptimized, goal, schema, agent_cfg)
            hypo = hypo_init(backend, triple.unoptimized, goal, schema, agent_cfg)
        elif cfg.dialectic_mode is DialecticMode.MERGED:
            plan, hypo = merged.init(triple.unoptimized, goal, schema)

        record = generate_and_evaluate(0)

        if cfg.dialectic_mode is DialecticMode.DISABLED:
            outcome.verdict = _verdict_of(record.report)
            return outcome

        t = 0
        while record.route is not FeedbackRoute.NONE and t < cfg.max_iters:
            feedback = _feedback_of(record.report, record.route)
            if cfg.dialectic_mode is DialecticMode.MERGED:
                plan, hypo = merged.update(
                    plan, hypo, feedback,
                    bump_hypo=record.route in (FeedbackRoute.FUNCTIONAL, FeedbackRoute.PPA))
            elif record.route is FeedbackRoute.SYNTAX:
                plan = articulator_update(backend, plan, feedback, agent_cfg)
            elif record.route is FeedbackRoute.FUNCTIONAL:
                hypo = hypo_update(backend, hypo, feedback, agent_cfg)
                plan = articulator_assist(backend, plan, feedback, agent_cfg)
            else:  # PPA shortfall: both sides revise
                plan = articulator_update(backend, plan, feedback, agent_cfg)
                hypo = hypo_update(backend, hypo, feedback, agent_cfg)

            t += 1
            record = generate_and_evaluate(t)

            if (cfg.stop_on_regression is not None
                    and record.report.stage_reached is EvalStage.COMPLETE
                    and stagnant >= cfg.stop_on_regression):
                outcome.notes.append(
                    f"stopped after {stagnant} non-improving complete iterations")
                break
    except (BackendUnavailable, ScriptExhausted, PlanParseError,
            HypothesisParseError, NoCodeFound) as exc:
        outcome.verdict = Verdict.FAIL_BACKEND
        outcome.notes.append(f"backend failure: {exc}")
        return outcome

    outcome.verdict = _verdict_of(outcome.iterations[-1].report)
    if outcome.verdict is Verdict.FAIL_PPA and best is not None:
        gain, candidate, assessment = best
        outcome.final_candidate = candidate
        outcome.final_metrics = assessment
        outcome.notes.append(
            f"best-so-far candidate retained ({assessment.primary_metric_name()}="
            f"{gain:.2f}%)")
    return outcome


def _verdict_of(report: EvaluationReport) -> Verdict:
    if report.stage_reached is EvalStage.COMPLETE and report.goals_met:
        return Verdict.SUCCESS
    if report.stage_reached is EvalStage.SYNTAX:
        return Verdict.FAIL_SYNTAX
    if report.stage_reached is EvalStage.FUNCTIONAL:
        return Verdict.FAIL_FUNCTIONAL
    return Verdict.FAIL_PPA


def _feedback_of(report: EvaluationReport, route: FeedbackRoute):
    if route is FeedbackRoute.SYNTAX:
        return report.syntax_errors
    if route is FeedbackRoute.FUNCTIONAL:
        return report.functional_mismatches
    if report.ppa is not None:
        return report.ppa
    return "; ".join(report.notes) or "PPA assessment unavailable"
