"""Student-set goals, threshold crossing, and consent-gated summaries.

Crossings are edge-triggered and upward-only: a preparation fires exactly when
completion moves from below the threshold to at-or-above it. What fires is
*preparation* of a summary the student curates; release is a separate step
that checks the release rule and the consent record at the instant of release,
so revoking consent between crossing and release blocks the release.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from ..context.items import ContextItem


class GoalMetric(str, Enum):
    DRAFT_COMPLETENESS = "DraftCompleteness"
    LITERATURE_REVIEWED_COUNT = "LiteratureReviewedCount"
    EXPERIMENTS_ANALYSED_COUNT = "ExperimentsAnalysedCount"
    CUSTOM = "Custom"


class ReleaseRule(str, Enum):
    MANUAL_ONLY = "ManualOnly"
    AUTO_SEND_ON_CROSS = "AutoSendOnCross"


# Items counting toward the count metrics carry these tags.
METRIC_TAGS = {
    GoalMetric.LITERATURE_REVIEWED_COUNT: "reviewed",
    GoalMetric.EXPERIMENTS_ANALYSED_COUNT: "analysed",
}

SECTION_TAG_PREFIX = "section:"


class GoalConfigError(Exception):
    pass


@dataclass(frozen=True)
class GoalEdit:
    at: float
    field: str
    old: str
    new: str


@dataclass(frozen=True)
class TaskGoal:
    id: str
    student_id: str
    title: str
    metric: GoalMetric
    target: float
    unit: str
    threshold: float
    release_rule: ReleaseRule = ReleaseRule.MANUAL_ONLY
    planned_sections: tuple[str, ...] = ()
    evaluator_ref: str | None = None
    created_at: float = 0.0
    edits: tuple[GoalEdit, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.metric is GoalMetric.DRAFT_COMPLETENESS and not self.planned_sections:
            raise GoalConfigError("draft-completeness goals need a planned-section manifest")
        if self.metric is GoalMetric.CUSTOM and not self.evaluator_ref:
            raise GoalConfigError("custom goals need an evaluator reference")

    def edited(self, at: float, field_name: str, new_value) -> "TaskGoal":
        old_value = getattr(self, field_name)
        edit = GoalEdit(at=at, field=field_name, old=str(old_value), new=str(new_value))
        return replace(self, **{field_name: new_value}, edits=self.edits + (edit,))


Evaluator = Callable[[TaskGoal, tuple[ContextItem, ...]], float]


def evaluate_goal(
    goal: TaskGoal,
    evidence: tuple[ContextItem, ...],
    evaluators: dict[str, Evaluator] | None = None,
) -> float:
    """Completion fraction in [0, 1] for the goal given the student's items."""
    if any(item.student_id != goal.student_id for item in evidence):
        raise ValueError("evidence items must belong to the goal's student")

    if goal.metric is GoalMetric.DRAFT_COMPLETENESS:
        if not goal.planned_sections:
            raise GoalConfigError("no planned sections configured")
        present = {
            tag[len(SECTION_TAG_PREFIX) :]
            for item in evidence
            for tag in item.tags
            if tag.startswith(SECTION_TAG_PREFIX)
        }
        count = sum(1 for section in goal.planned_sections if section in present)
        return count / len(goal.planned_sections)

    if goal.metric in METRIC_TAGS:
        if goal.target <= 0:
            raise GoalConfigError("count metrics need a positive target")
        tag = METRIC_TAGS[goal.metric]
        count = sum(1 for item in evidence if tag in item.tags)
        return min(count / goal.target, 1.0)

    if goal.metric is GoalMetric.CUSTOM:
        registry = evaluators or {}
        evaluator = registry.get(goal.evaluator_ref or "")
        if evaluator is None:
            raise GoalConfigError(f"no evaluator registered as {goal.evaluator_ref!r}")
        return max(0.0, min(evaluator(goal, evidence), 1.0))

    raise GoalConfigError(f"unhandled metric {goal.metric}")


def crossed_upward(goal: TaskGoal, old_completion: float, new_completion: float) -> bool:
    """True exactly when completion moves from below threshold to at/above it."""
    return old_completion < goal.threshold <= new_completion


@dataclass(frozen=True)
class ProgressSummary:
    id: str
    goal_id: str
    student_id: str
    completion: float
    narrative: str
    artefact_links: tuple[str, ...]
    curated_by: str | None = None
    released_to: str | None = None
    released_at: float | None = None

    @property
    def released(self) -> bool:
        return self.released_at is not None


def prepare_summary(
    summary_id: str,
    goal: TaskGoal,
    completion: float,
    evidence: tuple[ContextItem, ...],
) -> ProgressSummary:
    """Draft a summary for the student to curate; links only, no item bodies."""
    links = tuple(item.id for item in evidence)
    narrative = (
        f"{goal.title}: {completion:.0%} of {goal.target:g} {goal.unit} "
        f"(threshold {goal.threshold:.0%} reached; {len(links)} linked artefacts)"
    )
    return ProgressSummary(
        id=summary_id,
        goal_id=goal.id,
        student_id=goal.student_id,
        completion=completion,
        narrative=narrative,
        artefact_links=links,
    )


def curate_summary(summary: ProgressSummary, student_id: str, narrative: str | None = None) -> ProgressSummary:
    return replace(
        summary,
        curated_by=student_id,
        narrative=summary.narrative if narrative is None else narrative,
    )


def release_summary(summary: ProgressSummary, supervisor_id: str, at: float) -> ProgressSummary:
    if summary.curated_by is None:
        raise ValueError("a summary is released only after the student curates it")
    return replace(summary, released_to=supervisor_id, released_at=at)
