"""Routing, planning, and generation with inference-time scaling."""

from .backends import (
    Backend,
    BackendError,
    BackendReply,
    GenerationRequest,
    HttpBackend,
    MockBackend,
    QUESTIONS_ONLY_MARKER,
    ScriptRule,
    create_mock_backend_app,
)
from .bloom import BloomLevel, classify_bloom, verb_lexicon
from .planning import (
    Capability,
    CapabilityPlan,
    GenerationMode,
    PlanError,
    PlanStep,
    StepKind,
    build_plan,
)
from .routing import (
    GenerationBudget,
    POLICY_CORPUS_ID,
    ReasoningDepth,
    Route,
    RouteKind,
    SIGNPOSTING_ONLY,
    budget_for,
    classify_route,
)
from .scaling import (
    AssistantResponse,
    GenerationError,
    Trace,
    VoteResult,
    agreement_needed,
    canonicalize,
    execute_plan,
    self_consistency,
)

__all__ = [
    "Backend",
    "BackendError",
    "BackendReply",
    "GenerationRequest",
    "HttpBackend",
    "MockBackend",
    "QUESTIONS_ONLY_MARKER",
    "ScriptRule",
    "create_mock_backend_app",
    "BloomLevel",
    "classify_bloom",
    "verb_lexicon",
    "Capability",
    "CapabilityPlan",
    "GenerationMode",
    "PlanError",
    "PlanStep",
    "StepKind",
    "build_plan",
    "GenerationBudget",
    "POLICY_CORPUS_ID",
    "ReasoningDepth",
    "Route",
    "RouteKind",
    "SIGNPOSTING_ONLY",
    "budget_for",
    "classify_route",
    "AssistantResponse",
    "GenerationError",
    "Trace",
    "VoteResult",
    "agreement_needed",
    "canonicalize",
    "execute_plan",
    "self_consistency",
]
