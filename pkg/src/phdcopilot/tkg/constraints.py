"""Pairwise event-ordering checks over the fact history.

A constraint names two relations: every fact with the "after" relation must be
preceded (same subject) by at least one fact with the "before" relation. A
violation is reported when the prerequisite is missing entirely or when every
prerequisite comes later than the dependent event.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .store import TemporalFact, TemporalGraph


@dataclass(frozen=True)
class OrderingConstraint:
    id: str
    before_relation: str
    after_relation: str
    description: str = ""

    def __post_init__(self) -> None:
        if self.before_relation == self.after_relation:
            raise ValueError("ordering constraint needs two distinct relations")


@dataclass(frozen=True)
class ConstraintViolation:
    constraint_id: str
    subject: str
    fact: TemporalFact
    reason: str  # "missing-prerequisite" | "order"


def check_constraints(
    graph: TemporalGraph,
    constraints: Iterable[OrderingConstraint],
    as_of: float,
) -> list[ConstraintViolation]:
    live = sorted(graph.snapshot_at(as_of), key=lambda f: (f.asserted_at, f.key()))
    violations: list[ConstraintViolation] = []
    for constraint in constraints:
        befores: dict[str, list[float]] = {}
        for f in live:
            if f.relation == constraint.before_relation:
                befores.setdefault(f.subject, []).append(f.asserted_at)
        for f in live:
            if f.relation != constraint.after_relation:
                continue
            prereqs = befores.get(f.subject)
            if not prereqs:
                violations.append(
                    ConstraintViolation(constraint.id, f.subject, f, "missing-prerequisite")
                )
            elif all(f.asserted_at < t for t in prereqs):
                violations.append(
                    ConstraintViolation(constraint.id, f.subject, f, "order")
                )
    return violations
