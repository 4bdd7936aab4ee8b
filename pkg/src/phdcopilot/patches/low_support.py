"""Low-support competence checks.

The assistant is off for these: the session derives one explain-back question
per decision recorded against the artefact, carries an empty assist-capability
set, and the student's answers become a transcript stored back into their
ledger. Sessions are scoped objects; queries outside the session route and
generate as normal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..context.items import ContextItem, ItemKind


class MissingKeyStepsError(Exception):
    """The artefact has no recorded decisions; the supervisor should seed questions."""


@dataclass(frozen=True)
class CheckSession:
    id: str
    student_id: str
    artefact_id: str
    questions: tuple[str, ...]
    created_at: float
    assist_capabilities: frozenset[str] = frozenset()
    transcript: str | None = None


def build_check_session(
    session_id: str,
    artefact: ContextItem,
    decisions: tuple[ContextItem, ...],
    created_at: float,
) -> CheckSession:
    if artefact.kind is not ItemKind.ARTEFACT:
        raise ValueError(f"{artefact.id} is not an artefact")
    relevant = tuple(
        d for d in decisions if d.kind is ItemKind.DECISION and d.parent_id == artefact.id
    )
    if not relevant:
        raise MissingKeyStepsError(
            f"artefact {artefact.id} has no recorded key steps; "
            "ask the supervisor to seed questions"
        )
    questions = tuple(
        f"Explain, in your own words, the reasoning behind: {d.body}" for d in relevant
    )
    return CheckSession(
        id=session_id,
        student_id=artefact.student_id,
        artefact_id=artefact.id,
        questions=questions,
        created_at=created_at,
    )


def record_transcript(session: CheckSession, transcript: str) -> CheckSession:
    return replace(session, transcript=transcript)
