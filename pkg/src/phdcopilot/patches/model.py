"""Behaviour patches and the policy updates that record them.

A patch is a supervisor-authored constraint scoped to one student (optionally
one topic) that keeps steering assistant responses until superseded. Patches
are immutable: a correction supersedes and re-issues rather than editing in
place, which keeps the audit story linear.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..directives import (
    CompiledDirectives,
    Directive,
    DirectiveKind,
    GLOBAL_SCOPE,
    QuestioningLevel,
    SINGLE_VALUED_KINDS,
)

__all__ = [
    "BehaviourPatch",
    "CompiledDirectives",
    "Directive",
    "DirectiveKind",
    "GLOBAL_SCOPE",
    "PolicyUpdate",
    "QuestioningLevel",
    "SINGLE_VALUED_KINDS",
]


@dataclass(frozen=True)
class BehaviourPatch:
    id: str
    author_id: str
    student_id: str
    topic_key: str  # GLOBAL_SCOPE for a student-global patch
    directive_kind: DirectiveKind
    payload: tuple[str, ...]  # sources for RequireSources, one value otherwise
    attached_at: float
    superseded_by: str | None = None

    def __post_init__(self) -> None:
        if not self.student_id:
            raise ValueError("a patch is always scoped to exactly one student")
        if not self.payload:
            raise ValueError("a patch carries a non-empty constraint payload")

    @property
    def conflict_key(self) -> str | None:
        if self.directive_kind in SINGLE_VALUED_KINDS:
            return self.directive_kind.value
        return None


@dataclass(frozen=True)
class PolicyUpdate:
    """Record of a moderation return: the feedback, and the patch if any."""

    id: str
    student_id: str
    artefact_id: str
    feedback_text: str
    patch_id: str | None
    recorded_at: float
