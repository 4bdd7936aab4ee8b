"""Policy-author tooling: clause extraction, conflict scan, change tracing.

Policy documents mark machine-checkable requirements with one clause per line
in the micro-format ``topic-key: value`` (kebab-case key). Conflict detection
and version diffing work over those clause sets; free-text contradiction
detection is deliberately out of scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Corpus

_CLAUSE = re.compile(r"^\s*([a-z0-9]+(?:-[a-z0-9]+)+)\s*:\s*(\S.*?)\s*$")


@dataclass(frozen=True)
class Clause:
    topic_key: str
    value: str
    document_id: str
    document_version: str
    line_no: int


@dataclass(frozen=True)
class ClauseConflict:
    clause_a: Clause
    clause_b: Clause
    topic_key: str


@dataclass(frozen=True)
class DiffEntry:
    kind: str  # "added" | "removed" | "changed"
    topic_key: str
    before: str | None
    after: str | None


def extract_clauses(corpus: Corpus) -> tuple[list[Clause], list[str]]:
    """All clauses in the corpus, plus warnings for unmarked documents."""
    clauses: list[Clause] = []
    warnings: list[str] = []
    for doc in corpus.documents:
        found = False
        for line_no, line in enumerate(doc.body.splitlines(), start=1):
            match = _CLAUSE.match(line)
            if match:
                found = True
                clauses.append(
                    Clause(
                        topic_key=match.group(1),
                        value=match.group(2),
                        document_id=doc.id,
                        document_version=doc.version,
                        line_no=line_no,
                    )
                )
        if not found:
            warnings.append(f"{doc.id}: no clause markers found, skipped")
    return clauses, warnings


def conflict_scan(corpus: Corpus) -> tuple[list[ClauseConflict], list[str]]:
    """Every pair of clauses sharing a topic key with differing values."""
    clauses, warnings = extract_clauses(corpus)
    by_key: dict[str, list[Clause]] = {}
    for clause in clauses:
        by_key.setdefault(clause.topic_key, []).append(clause)
    conflicts = []
    for key in sorted(by_key):
        group = by_key[key]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if group[i].value != group[j].value:
                    conflicts.append(ClauseConflict(group[i], group[j], key))
    return conflicts, warnings


def clause_value_sets(corpus: Corpus) -> dict[str, set[str]]:
    clauses, _ = extract_clauses(corpus)
    out: dict[str, set[str]] = {}
    for clause in clauses:
        out.setdefault(clause.topic_key, set()).add(clause.value)
    return out


def policy_diff(corpus_v1: Corpus, corpus_v2: Corpus) -> list[DiffEntry]:
    """Clause-set diff between two corpus versions.

    Applying the diff to v1's clause set reconstructs v2's exactly; a key with
    a single value on both sides that differs is reported as one Changed entry.
    """
    v1 = clause_value_sets(corpus_v1)
    v2 = clause_value_sets(corpus_v2)
    entries: list[DiffEntry] = []
    for key in sorted(set(v1) | set(v2)):
        values1 = v1.get(key, set())
        values2 = v2.get(key, set())
        if values1 == values2:
            continue
        if len(values1) == 1 and len(values2) == 1:
            entries.append(DiffEntry("changed", key, next(iter(values1)), next(iter(values2))))
            continue
        for value in sorted(values1 - values2):
            entries.append(DiffEntry("removed", key, value, None))
        for value in sorted(values2 - values1):
            entries.append(DiffEntry("added", key, None, value))
    return entries


def apply_diff(clause_set: set[tuple[str, str]], entries: list[DiffEntry]) -> set[tuple[str, str]]:
    """Replay a diff over a (topic_key, value) set; used as the oracle check."""
    out = set(clause_set)
    for entry in entries:
        if entry.kind == "removed":
            out.discard((entry.topic_key, entry.before))  # type: ignore[arg-type]
        elif entry.kind == "added":
            out.add((entry.topic_key, entry.after))  # type: ignore[arg-type]
        elif entry.kind == "changed":
            out.discard((entry.topic_key, entry.before))  # type: ignore[arg-type]
            out.add((entry.topic_key, entry.after))  # type: ignore[arg-type]
    return out
