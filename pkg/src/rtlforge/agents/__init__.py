"""Dialectic agents, knowledge injection, and the coding agent."""

from rtlforge.agents.backend import (
    BackendUnavailable,
    ChatBackend,
    ChatExchange,
    HttpBackend,
    HttpBackendConfig,
    ScriptBank,
    ScriptExhausted,
    ScriptedBackend,
    llm_complete,
    make_exchange,
)
from rtlforge.agents.coder import (
    CandidateCode,
    ExtractionMethod,
    NoCodeFound,
    extract_candidate,
    generate_candidate,
)
from rtlforge.agents.dialectic import (
    AgentConfig,
    DeviationRecord,
    HypothesisSet,
    TransformationPlan,
    articulator_assist,
    articulator_init,
    articulator_update,
    hypo_init,
    hypo_update,
    render_feedback,
)
from rtlforge.agents.injector import (
    BankExample,
    BudgetTooSmall,
    EmptyBank,
    ExampleBank,
    PromptBundle,
    bundled_bank,
    compose_prompt,
    estimate_tokens,
    feature_vector,
    select_examples,
)
from rtlforge.agents.protocol import (
    HypothesisParseError,
    PlanDiff,
    PlanParseError,
    PlanStep,
    Prediction,
    Risk,
)

__all__ = [
    "AgentConfig",
    "BackendUnavailable",
    "BankExample",
    "BudgetTooSmall",
    "CandidateCode",
    "ChatBackend",
    "ChatExchange",
    "DeviationRecord",
    "EmptyBank",
    "ExampleBank",
    "ExtractionMethod",
    "HttpBackend",
    "HttpBackendConfig",
    "HypothesisParseError",
    "HypothesisSet",
    "NoCodeFound",
    "PlanDiff",
    "PlanParseError",
    "PlanStep",
    "Prediction",
    "PromptBundle",
    "Risk",
    "ScriptBank",
    "ScriptExhausted",
    "ScriptedBackend",
    "TransformationPlan",
    "articulator_assist",
    "articulator_init",
    "articulator_update",
    "bundled_bank",
    "compose_prompt",
    "estimate_tokens",
    "extract_candidate",
    "feature_vector",
    "generate_candidate",
    "hypo_init",
    "hypo_update",
    "llm_complete",
    "make_exchange",
    "render_feedback",
    "select_examples",
]
