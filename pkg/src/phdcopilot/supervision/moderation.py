"""The moderation-loop state machine.

One artefact, one case, one legal path:
Draft -> Shared -> UnderReview -> Returned -> Applied -> Closed.
Returning requires feedback; acknowledging (Returned -> Applied) is the
student confirming they have taken the feedback into their loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum


class CaseState(str, Enum):
    DRAFT = "Draft"
    SHARED = "Shared"
    UNDER_REVIEW = "UnderReview"
    RETURNED = "Returned"
    APPLIED = "Applied"
    CLOSED = "Closed"


_ORDER = [
    CaseState.DRAFT,
    CaseState.SHARED,
    CaseState.UNDER_REVIEW,
    CaseState.RETURNED,
    CaseState.APPLIED,
    CaseState.CLOSED,
]

LEGAL_TRANSITIONS: frozenset[tuple[CaseState, CaseState]] = frozenset(
    zip(_ORDER, _ORDER[1:])
)


class IllegalTransitionError(Exception):
    def __init__(self, current: CaseState, requested: CaseState):
        super().__init__(f"illegal transition {current.value} -> {requested.value}")
        self.current = current
        self.requested = requested


@dataclass(frozen=True)
class ModerationCase:
    id: str
    artefact_id: str
    student_id: str
    supervisor_id: str
    state: CaseState = CaseState.DRAFT
    shared_at: float | None = None
    returned_at: float | None = None
    closed_at: float | None = None
    feedback: str | None = None
    patch_id: str | None = None
    history: tuple[CaseState, ...] = (CaseState.DRAFT,)

    def transition(self, to: CaseState, at: float, **fields) -> "ModerationCase":
        if (self.state, to) not in LEGAL_TRANSITIONS:
            raise IllegalTransitionError(self.state, to)
        stamps: dict[str, float | None] = {}
        if to is CaseState.SHARED:
            stamps["shared_at"] = at
        elif to is CaseState.RETURNED:
            stamps["returned_at"] = at
        elif to is CaseState.CLOSED:
            stamps["closed_at"] = at
        return replace(
            self, state=to, history=self.history + (to,), **stamps, **fields
        )


def share(case: ModerationCase, at: float) -> ModerationCase:
    return case.transition(CaseState.SHARED, at)


def begin_review(case: ModerationCase, at: float) -> ModerationCase:
    return case.transition(CaseState.UNDER_REVIEW, at)


def return_with_feedback(
    case: ModerationCase, at: float, feedback: str, patch_id: str | None = None
) -> ModerationCase:
    if not feedback or not feedback.strip():
        raise ValueError("returning a case requires feedback")
    return case.transition(CaseState.RETURNED, at, feedback=feedback, patch_id=patch_id)


def acknowledge(case: ModerationCase, at: float) -> ModerationCase:
    return case.transition(CaseState.APPLIED, at)


def close(case: ModerationCase, at: float) -> ModerationCase:
    return case.transition(CaseState.CLOSED, at)
