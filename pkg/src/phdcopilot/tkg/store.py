"""Temporal fact store for a candidature timeline.

Facts are (subject, relation, object) quadrupled with an assertion timestamp;
history is monotone: facts are never deleted, only retracted with a later
timestamp. A fact is live at time t iff asserted_at <= t < retracted_at (or it
was never retracted). Snapshot and diff are pure reads over that rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable


class DuplicateFactError(Exception):
    pass


class FactNotFoundError(Exception):
    pass


@dataclass(frozen=True)
class TemporalFact:
    subject: str
    relation: str
    object: str
    asserted_at: float
    retracted_at: float | None = None

    def key(self) -> tuple[str, str, str, float]:
        return (self.subject, self.relation, self.object, self.asserted_at)

    def live_at(self, t: float) -> bool:
        if t < self.asserted_at:
            return False
        return self.retracted_at is None or t < self.retracted_at


@dataclass(frozen=True)
class GraphDiff:
    appeared: frozenset[TemporalFact]
    disappeared: frozenset[TemporalFact]


class TemporalGraph:
    def __init__(self, clock: Callable[[], float] | None = None):
        self._clock = clock or (lambda: float("inf"))
        self._facts: list[TemporalFact] = []
        self._by_key: dict[tuple[str, str, str, float], int] = {}

    def __len__(self) -> int:
        return len(self._facts)

    @property
    def facts(self) -> tuple[TemporalFact, ...]:
        return tuple(self._facts)

    def assert_fact(self, fact: TemporalFact) -> int:
        if fact.asserted_at > self._clock():
            raise ValueError("asserted_at is in the future of the store clock")
        if fact.key() in self._by_key:
            raise DuplicateFactError(f"fact already asserted: {fact.key()}")
        fact_id = len(self._facts)
        self._facts.append(fact)
        self._by_key[fact.key()] = fact_id
        return fact_id

    def retract_fact(self, fact_id: int, at: float) -> TemporalFact:
        if not 0 <= fact_id < len(self._facts):
            raise FactNotFoundError(f"no fact with id {fact_id}")
        fact = self._facts[fact_id]
        if fact.retracted_at is not None:
            raise ValueError(f"fact {fact_id} already retracted")
        if at <= fact.asserted_at:
            raise ValueError("retraction must come strictly after assertion")
        if at > self._clock():
            raise ValueError("retraction timestamp is in the future of the store clock")
        updated = replace(fact, retracted_at=at)
        self._facts[fact_id] = updated
        self._by_key[fact.key()] = fact_id
        return updated

    def snapshot_at(self, t: float) -> frozenset[TemporalFact]:
        return frozenset(f for f in self._facts if f.live_at(t))

    def diff(self, t1: float, t2: float) -> GraphDiff:
        if t1 > t2:
            raise ValueError("diff requires t1 <= t2")
        before = self.snapshot_at(t1)
        after = self.snapshot_at(t2)
        return GraphDiff(
            appeared=frozenset(after - before),
            disappeared=frozenset(before - after),
        )

    def find(
        self,
        subject: str | None = None,
        relation: str | None = None,
        at: float | None = None,
    ) -> tuple[TemporalFact, ...]:
        out = []
        for f in self._facts:
            if subject is not None and f.subject != subject:
                continue
            if relation is not None and f.relation != relation:
                continue
            if at is not None and not f.live_at(at):
                continue
            out.append(f)
        return tuple(out)


def export_facts(graph: TemporalGraph) -> str:
    """Line-delimited JSON quadruples, one fact per line."""
    lines = []
    for f in graph.facts:
        lines.append(
            json.dumps(
                {
                    "subject": f.subject,
                    "relation": f.relation,
                    "object": f.object,
                    "asserted_at": f.asserted_at,
                    "retracted_at": f.retracted_at,
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def import_facts(text: str, clock: Callable[[], float] | None = None) -> TemporalGraph:
    graph = TemporalGraph(clock=clock)
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        raw = json.loads(line)
        fact_id = graph.assert_fact(
            TemporalFact(
                subject=raw["subject"],
                relation=raw["relation"],
                object=raw["object"],
                asserted_at=raw["asserted_at"],
            )
        )
        if raw.get("retracted_at") is not None:
            graph.retract_fact(fact_id, raw["retracted_at"])
    return graph
