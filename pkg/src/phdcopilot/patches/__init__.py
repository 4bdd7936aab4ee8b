"""Behaviour patches, questioning modes, and learning guards."""

from .engine import PatchEngine, render_patch_digest
from .low_support import CheckSession, MissingKeyStepsError, build_check_session, record_transcript
from .model import (
    BehaviourPatch,
    CompiledDirectives,
    Directive,
    DirectiveKind,
    GLOBAL_SCOPE,
    PolicyUpdate,
    QuestioningLevel,
    SINGLE_VALUED_KINDS,
)
from .practice import (
    DEFAULT_BASE_INTERVAL,
    PracticeItem,
    due_list,
    new_practice_item,
    schedule_review,
)
from .questioning import questioning_transform

__all__ = [
    "PatchEngine",
    "render_patch_digest",
    "CheckSession",
    "MissingKeyStepsError",
    "build_check_session",
    "record_transcript",
    "BehaviourPatch",
    "CompiledDirectives",
    "Directive",
    "DirectiveKind",
    "GLOBAL_SCOPE",
    "PolicyUpdate",
    "QuestioningLevel",
    "SINGLE_VALUED_KINDS",
    "DEFAULT_BASE_INTERVAL",
    "PracticeItem",
    "due_list",
    "new_practice_item",
    "schedule_review",
    "questioning_transform",
]
