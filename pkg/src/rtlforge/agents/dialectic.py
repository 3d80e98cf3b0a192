"""The two dialectic reasoning agents: plan author and outcome predictor.

The plan side decomposes the transformation into ordered, construct-anchored
steps and revises them on syntactic or PPA feedback; the hypothesis side
predicts metric outcomes before any code exists, then reconciles predictions
against measurements and attributes failure causes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from rtlforge.agents.backend import ChatBackend, make_exchange
from rtlforge.agents.protocol import (
    FORMAT_REMINDER,
    HypothesisParseError,
    PlanDiff,
    PlanParseError,
    PlanStep,
    Prediction,
    Risk,
    parse_cause,
    parse_plan_lines,
    parse_prediction,
    parse_risks,
)
from rtlforge.frontend.schema import parse_dfg, schema_labels
from rtlforge.frontend.syntax import VerilogSource
from rtlforge.goals import GoalSpec, OptimizationKind


@dataclass
class AgentConfig:
    model_id: str = "default"
    temperature: float = 0.2
    re_ask: bool = True


@dataclass
class TransformationPlan:
    goal: OptimizationKind
    steps: list[PlanStep]
    assumptions: list[str] = field(default_factory=list)
    revision: int = 0
    last_diff: PlanDiff | None = None

    def render(self) -> str:
        lines = [f"STEP {s.index}: {s.action}" for s in self.steps]
        lines += [f"ASSUME: {a}" for a in self.assumptions]
        return "\n".join(lines)

    def unanchored_steps(self) -> list[PlanStep]:
        return [s for s in self.steps if not s.anchored]


@dataclass
class DeviationRecord:
    metric: str
    predicted: float
    observed: float
    cause: str

    @property
    def delta(self) -> float:
        return self.observed - self.predicted


@dataclass
class HypothesisSet:
    predicted: Prediction
    risks: list[Risk] = field(default_factory=list)
    revision: int = 0
    area_ratio_defaulted: bool = False
    deviations: list[DeviationRecord] = field(default_factory=list)

    def render(self) -> str:
        p = self.predicted
        lines = [
            "PREDICT "
            f"timing_gain={p.timing_gain if p.timing_gain is not None else 0:g} "
            f"power_gain={p.power_gain if p.power_gain is not None else 0:g} "
            f"area_ratio={p.area_ratio if p.area_ratio is not None else 1.0:g}"
        ]
        lines += [f"RISK: {r.description}" for r in self.risks]
        return "\n".join(lines)


_PLANNER_SYSTEM = (
    "You are the planning half of an RTL optimization pair. Decompose the "
    "requested transformation into ordered steps over the design's dataflow "
    "graph, referencing graph constructs as @label. Keep step numbering "
    "stable across revisions. "
) + FORMAT_REMINDER

_PREDICTOR_SYSTEM = (
    "You are the predictive half of an RTL optimization pair. Before any "
    "code is written, predict metric outcomes and list structural or "
    "functional risks of the planned transformation. "
) + FORMAT_REMINDER


def _labels_from_schema(dfg_schema: str) -> set[str]:
    try:
        return schema_labels(parse_dfg(dfg_schema))
    except Exception:
        return set()


def _ask(backend: ChatBackend, system: str, user: str, config: AgentConfig,
         agent: str, revision: int) -> str:
    return backend.complete(
        make_exchange(system, user, config.model_id, config.temperature),
        agent=agent, revision=revision)


def render_feedback(feedback) -> str:
    """Uniform text form for syntax lists, mismatch lists, PPA results, or notes."""
    if isinstance(feedback, str):
        return feedback
    if hasattr(feedback, "feedback_text"):
        return feedback.feedback_text()
    parts = []
    for item in feedback:
        if hasattr(item, "render"):
            parts.append(item.render())
        else:
            parts.append(str(item))
    return "\n".join(parts)


def _require_feedback(feedback):
    if feedback is None:
        raise ValueError("feedback must be nonempty")
    if not isinstance(feedback, str) and not hasattr(feedback, "feedback_text"):
        if not list(feedback):
            raise ValueError("feedback must be nonempty")


# --- plan author ---


def articulator_init(backend: ChatBackend, c0: VerilogSource, goal: GoalSpec,
                     dfg_schema: str, config: AgentConfig | None = None) -> TransformationPlan:
    if not dfg_schema.strip():
        raise ValueError("dfg schema must be nonempty")
    config = config or AgentConfig()
    labels = _labels_from_schema(dfg_schema)
    user = (
        f"Optimization target: {goal.describe()}.\n\n"
        f"Dataflow graph:\n{dfg_schema}\n\nDesign source:\n{c0.text}\n\n"
        "Produce the stepwise transformation plan."
    )
    steps, assumptions = _parse_plan_with_retry(
        backend, user, labels, config, revision=0)
    return TransformationPlan(goal.kind, steps, assumptions, revision=0)


def articulator_update(backend: ChatBackend, plan: TransformationPlan, feedback,
                       config: AgentConfig | None = None) -> TransformationPlan:
    _require_feedback(feedback)
    config = config or AgentConfig()
    user = (
        f"Current plan (revision {plan.revision}):\n{plan.render()}\n\n"
        f"Evaluation feedback:\n{render_feedback(feedback)}\n\n"
        "Revise the plan to address the feedback; preserve step numbering "
        "where steps are unchanged."
    )
    return _revised_plan(backend, plan, user, config)


def articulator_assist(backend: ChatBackend, plan: TransformationPlan, mismatches,
                       config: AgentConfig | None = None) -> TransformationPlan:
    _require_feedback(mismatches)
    config = config or AgentConfig()
    user = (
        f"Current plan (revision {plan.revision}):\n{plan.render()}\n\n"
        "The candidate is syntactically sound but behaves differently from "
        "the original design. Treat these observations as correctness "
        f"constraints the plan must satisfy:\n{render_feedback(mismatches)}\n\n"
        "Amend the plan (steps and assumptions) so behavior is preserved."
    )
    return _revised_plan(backend, plan, user, config)


def _revised_plan(backend: ChatBackend, plan: TransformationPlan, user: str,
                  config: AgentConfig) -> TransformationPlan:
    labels = {s.target for s in plan.steps if s.target}
    revision = plan.revision + 1
    steps, assumptions = _parse_plan_with_retry(
        backend, user, labels, config, revision=revision)
    return TransformationPlan(
        goal=plan.goal,
        steps=steps,
        assumptions=assumptions or plan.assumptions,
        revision=revision,
        last_diff=_diff_steps(plan.steps, steps),
    )


def _parse_plan_with_retry(backend, user, labels, config, revision):
    response = _ask(backend, _PLANNER_SYSTEM, user, config, "articulator", revision)
    try:
        return parse_plan_lines(response, labels)
    except PlanParseError:
        if not config.re_ask:
            raise
    response = _ask(backend, _PLANNER_SYSTEM, user + "\n\n" + FORMAT_REMINDER,
                    config, "articulator", revision)
    return parse_plan_lines(response, labels)


def _diff_steps(old: list[PlanStep], new: list[PlanStep]) -> PlanDiff:
    old_by_index = {s.index: s for s in old}
    new_by_index = {s.index: s for s in new}
    added = tuple(i for i in sorted(new_by_index) if i not in old_by_index)
    removed = tuple(i for i in sorted(old_by_index) if i not in new_by_index)
    modified = tuple(
        i for i in sorted(new_by_index)
        if i in old_by_index and new_by_index[i].action != old_by_index[i].action)
    return PlanDiff(added, removed, modified)


# --- outcome predictor ---


def hypo_init(backend: ChatBackend, c0: VerilogSource, goal: GoalSpec,
              dfg_schema: str, config: AgentConfig | None = None) -> HypothesisSet:
    if not dfg_schema.strip():
        raise ValueError("dfg schema must be nonempty")
    config = config or AgentConfig()
    labels = _labels_from_schema(dfg_schema)
    user = (
        f"Optimization target: {goal.describe()}.\n\n"
        f"Dataflow graph:\n{dfg_schema}\n\nDesign source:\n{c0.text}\n\n"
        "Predict metric outcomes of the transformation and list risks."
    )
    response = _ask(backend, _PREDICTOR_SYSTEM, user, config, "hypothesis", 0)
    prediction = parse_prediction(response)
    defaulted = False
    if prediction is None or prediction.area_ratio is None:
        if config.re_ask:
            response2 = _ask(backend, _PREDICTOR_SYSTEM,
                             user + "\n\n" + FORMAT_REMINDER, config, "hypothesis", 0)
            prediction2 = parse_prediction(response2)
            if prediction2 is not None and prediction2.area_ratio is not None:
                prediction = prediction2
                response = response2
            elif prediction is None and prediction2 is not None:
                prediction = prediction2
                response = response2
        if prediction is None:
            raise HypothesisParseError("no parseable PREDICT line after re-ask")
        if prediction.area_ratio is None:
            prediction = replace(prediction, area_ratio=1.0)
            defaulted = True
    _check_area_ratio(prediction)
    return HypothesisSet(
        predicted=prediction,
        risks=parse_risks(response, labels),
        revision=0,
        area_ratio_defaulted=defaulted,
    )


def hypo_update(backend: ChatBackend, hypo: HypothesisSet, feedback,
                config: AgentConfig | None = None) -> HypothesisSet:
    _require_feedback(feedback)
    config = config or AgentConfig()
    revision = hypo.revision + 1
    user = (
        f"Current hypotheses (revision {hypo.revision}):\n{hypo.render()}\n\n"
        f"Observed feedback:\n{render_feedback(feedback)}\n\n"
        "Reconcile predictions with observations: update the PREDICT line, "
        "attribute deviations with a CAUSE line, and list new RISK entries."
    )
    response = _ask(backend, _PREDICTOR_SYSTEM, user, config, "hypothesis", revision)
    prediction = parse_prediction(response)
    if prediction is None:
        if config.re_ask:
            response = _ask(backend, _PREDICTOR_SYSTEM,
                            user + "\n\n" + FORMAT_REMINDER, config, "hypothesis", revision)
            prediction = parse_prediction(response)
        if prediction is None:
            raise HypothesisParseError("no parseable PREDICT line after re-ask")
    if prediction.area_ratio is None:
        prediction = replace(prediction, area_ratio=hypo.predicted.area_ratio or 1.0)
    _check_area_ratio(prediction)

    deviations = list(hypo.deviations)
    observed = _observed_metric(feedback)
    if observed is not None:
        metric, value = observed
        predicted_value = getattr(hypo.predicted, metric, None) or 0.0
        deviations.append(DeviationRecord(
            metric=metric,
            predicted=predicted_value,
            observed=value,
            cause=parse_cause(response) or "unattributed",
        ))

    risks = list(hypo.risks)
    new_risks = parse_risks(response, set())
    if not new_risks and _is_mismatch_feedback(feedback):
        first = list(feedback)[0]
        new_risks = [Risk(f"behavioral mismatch observed on {getattr(first, 'signal', '?')}")]
    for risk in new_risks:
        if risk not in risks:
            risks.append(risk)

    return HypothesisSet(
        predicted=prediction,
        risks=risks,
        revision=revision,
        area_ratio_defaulted=hypo.area_ratio_defaulted,
        deviations=deviations,
    )


def _check_area_ratio(prediction: Prediction):
    if prediction.area_ratio is not None and prediction.area_ratio <= 0:
        raise HypothesisParseError(f"area ratio must be positive, got {prediction.area_ratio}")


def _observed_metric(feedback) -> tuple[str, float] | None:
    if hasattr(feedback, "primary_metric_name"):
        name = feedback.primary_metric_name()
        return name, getattr(feedback, name)
    return None


def _is_mismatch_feedback(feedback) -> bool:
    if isinstance(feedback, str) or hasattr(feedback, "feedback_text"):
        return False
    items = list(feedback)
    return bool(items) and hasattr(items[0], "signal")
