"""Student-specific private context store."""

from .items import (
    ContextItem,
    ContextStore,
    ItemKind,
    ItemNotFoundError,
    RetentionClass,
    Verification,
)
from .readiness import READINESS_COMPONENTS, ReadinessState, citation_coverage
from .summary import (
    DEFAULT_BUDGET,
    RollingSummary,
    Turn,
    salient_turn_indices,
    update_rolling_summary,
)

__all__ = [
    "ContextItem",
    "ContextStore",
    "ItemKind",
    "ItemNotFoundError",
    "RetentionClass",
    "Verification",
    "READINESS_COMPONENTS",
    "ReadinessState",
    "citation_coverage",
    "DEFAULT_BUDGET",
    "RollingSummary",
    "Turn",
    "salient_turn_indices",
    "update_rolling_summary",
]
