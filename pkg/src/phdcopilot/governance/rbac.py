"""Role-based access control over a static, enumerable rule table.

The table maps (role, action, resource kind) to a relation the actor must
hold with the resource owner: themselves, one of their supervisees, or anyone.
Absent entries deny, and every denial names the rule it enforces so callers
(and API error envelopes) can surface it. Kept as a flat table rather than an
expression language so the whole policy can be read, diffed, and tested.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .actors import Actor, Role


class Rel(Enum):
    """Relation the actor must hold with the resource owner."""

    ANY = "any"
    SELF = "self"
    SUPERVISEE = "supervisee"


@dataclass(frozen=True)
class ResourceRef:
    """A governed resource: its kind plus the id of the actor it concerns."""

    kind: str
    owner_id: str = ""

    def __str__(self) -> str:
        return f"{self.kind}:{self.owner_id}" if self.owner_id else self.kind


@dataclass(frozen=True)
class Decision:
    allowed: bool
    rule: str

    def __bool__(self) -> bool:
        return self.allowed


def allow(rule: str) -> Decision:
    return Decision(True, rule)


def deny(rule: str) -> Decision:
    return Decision(False, rule)


# (role, action, resource kind) -> required relation. The student's private
# store is reachable by the student alone; supervisors see released summaries
# and moderation cases for their own students only; the GRS sees the policy
# corpus and consented aggregates, never individual student state.
RULES: dict[tuple[Role, str, str], Rel] = {
    # Private context store.
    (Role.STUDENT, "read", "context-item"): Rel.SELF,
    (Role.STUDENT, "write", "context-item"): Rel.SELF,
    (Role.STUDENT, "purge", "context-item"): Rel.SELF,
    (Role.STUDENT, "export", "context-item"): Rel.SELF,
    (Role.SYSTEM, "write", "context-item"): Rel.ANY,
    # Readiness vector lives in the private store.
    (Role.STUDENT, "read", "readiness"): Rel.SELF,
    (Role.STUDENT, "write", "readiness"): Rel.SELF,
    # Queries into the private loop.
    (Role.STUDENT, "query", "assistant"): Rel.SELF,
    # Goals and thresholds are student-set.
    (Role.STUDENT, "read", "goal"): Rel.SELF,
    (Role.STUDENT, "write", "goal"): Rel.SELF,
    # Consent is set by the student it covers.
    (Role.STUDENT, "read", "consent"): Rel.SELF,
    (Role.STUDENT, "write", "consent"): Rel.SELF,
    # Moderation loop.
    (Role.STUDENT, "share", "context-item"): Rel.SELF,
    (Role.SUPERVISOR, "read", "moderation-case"): Rel.SUPERVISEE,
    (Role.SUPERVISOR, "review", "moderation-case"): Rel.SUPERVISEE,
    (Role.SUPERVISOR, "return", "moderation-case"): Rel.SUPERVISEE,
    (Role.STUDENT, "read", "moderation-case"): Rel.SELF,
    (Role.STUDENT, "acknowledge", "moderation-case"): Rel.SELF,
    (Role.STUDENT, "close", "moderation-case"): Rel.SELF,
    (Role.SUPERVISOR, "read", "queue"): Rel.SELF,
    # Behaviour patches: supervisor-authored, visible to the student.
    (Role.SUPERVISOR, "attach", "patch"): Rel.SUPERVISEE,
    (Role.SUPERVISOR, "read", "patch"): Rel.SUPERVISEE,
    (Role.STUDENT, "read", "patch"): Rel.SELF,
    # Progress summaries: owner curates; the releasedTo supervisor reads.
    (Role.STUDENT, "read", "summary"): Rel.SELF,
    (Role.STUDENT, "write", "summary"): Rel.SELF,
    (Role.SUPERVISOR, "read-summary", "summary"): Rel.SUPERVISEE,
    # Policy corpus: everyone reads, the GRS maintains it.
    (Role.STUDENT, "read", "policy-corpus"): Rel.ANY,
    (Role.SUPERVISOR, "read", "policy-corpus"): Rel.ANY,
    (Role.GRS, "read", "policy-corpus"): Rel.ANY,
    (Role.SYSTEM, "read", "policy-corpus"): Rel.ANY,
    (Role.GRS, "write", "policy-corpus"): Rel.ANY,
    # Student corpora are part of the private store.
    (Role.STUDENT, "write", "student-corpus"): Rel.SELF,
    (Role.STUDENT, "read", "student-corpus"): Rel.SELF,
    # Low-support competence checks: the student or their supervisor starts one.
    (Role.STUDENT, "start", "check-session"): Rel.SELF,
    (Role.SUPERVISOR, "start", "check-session"): Rel.SUPERVISEE,
    (Role.STUDENT, "complete", "check-session"): Rel.SELF,
    # Aggregate signals are the GRS view.
    (Role.GRS, "read", "aggregate"): Rel.ANY,
    # Retrieval practice items.
    (Role.STUDENT, "read", "practice-item"): Rel.SELF,
    (Role.STUDENT, "write", "practice-item"): Rel.SELF,
    # Audit verification is open; event reads are filtered per event resource.
    (Role.STUDENT, "verify", "audit-log"): Rel.ANY,
    (Role.SUPERVISOR, "verify", "audit-log"): Rel.ANY,
    (Role.GRS, "verify", "audit-log"): Rel.ANY,
    (Role.SYSTEM, "verify", "audit-log"): Rel.ANY,
}

# Named rules quoted in denials, keyed by resource kind (with action-specific
# overrides where a finer name exists).
_DENY_BY_KIND: dict[str, str] = {
    "context-item": "student-context-isolation",
    "readiness": "student-context-isolation",
    "assistant": "student-loop-owner-only",
    "goal": "goal-owner-only",
    "consent": "consent-self-only",
    "moderation-case": "case-participant-only",
    "queue": "queue-owner-only",
    "patch": "patch-supervisor-scope",
    "summary": "summary-supervisee-scope",
    "policy-corpus": "policy-write-grs-only",
    "aggregate": "aggregate-grs-only",
    "practice-item": "practice-owner-only",
    "audit-log": "audit-read-scope",
    "student-corpus": "student-context-isolation",
    "check-session": "check-session-participant-only",
}

_DENY_BY_ACTION: dict[tuple[str, str], str] = {
    ("read", "policy-corpus"): "policy-read-denied",
    ("read-summary", "summary"): "summary-supervisee-scope",
}


def deny_rule_for(action: str, kind: str) -> str:
    return _DENY_BY_ACTION.get((action, kind)) or _DENY_BY_KIND.get(
        kind, f"no-grant:{action}:{kind}"
    )


def authorize(actor: Actor, action: str, resource: ResourceRef) -> Decision:
    """Pure decision for (actor, action, resource) against the rule table.

    Callers must resolve ``actor`` through the registry first; an unregistered
    id raises UnknownActorError there rather than producing a Deny here.
    """
    required = RULES.get((actor.role, action, resource.kind))
    rule = deny_rule_for(action, resource.kind)
    if required is None:
        return deny(rule)
    if required is Rel.ANY:
        return allow(f"{actor.role.value.lower()}-{action}-{resource.kind}")
    if required is Rel.SELF:
        if resource.owner_id == actor.id:
            return allow(f"owner-{action}-{resource.kind}")
        return deny(rule)
    if required is Rel.SUPERVISEE:
        if resource.owner_id in actor.supervisees:
            return allow(f"supervisee-{action}-{resource.kind}")
        return deny(rule)
    raise AssertionError(f"unhandled relation {required}")
