"""Moderation loop, goals and thresholds, consent-gated summaries, aggregates."""

from .aggregates import (
    AggregateSignal,
    DEFAULT_K_MIN,
    METRIC_MEAN_COMPLETION,
    METRIC_ON_TRACK_RATE,
    StudentProgress,
    emit_aggregates,
)
from .goals import (
    GoalConfigError,
    GoalEdit,
    GoalMetric,
    ProgressSummary,
    ReleaseRule,
    TaskGoal,
    crossed_upward,
    curate_summary,
    evaluate_goal,
    prepare_summary,
    release_summary,
)
from .moderation import (
    CaseState,
    IllegalTransitionError,
    LEGAL_TRANSITIONS,
    ModerationCase,
    acknowledge,
    begin_review,
    close,
    return_with_feedback,
    share,
)

__all__ = [
    "AggregateSignal",
    "DEFAULT_K_MIN",
    "METRIC_MEAN_COMPLETION",
    "METRIC_ON_TRACK_RATE",
    "StudentProgress",
    "emit_aggregates",
    "GoalConfigError",
    "GoalEdit",
    "GoalMetric",
    "ProgressSummary",
    "ReleaseRule",
    "TaskGoal",
    "crossed_upward",
    "curate_summary",
    "evaluate_goal",
    "prepare_summary",
    "release_summary",
    "CaseState",
    "IllegalTransitionError",
    "LEGAL_TRANSITIONS",
    "ModerationCase",
    "acknowledge",
    "begin_review",
    "close",
    "return_with_feedback",
    "share",
]
