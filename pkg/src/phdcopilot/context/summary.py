"""Rolling conversation summaries for long-dialogue coherence.

The baseline summarizer is deterministic and backend-independent: it keeps the
most recent turn plus every turn that a later turn refers back to (a ``#<n>``
marker in the text), then packs their excerpts newest-first into the character
budget. A generation backend may replace the digest text, but the budget bound
and snippet-membership guarantees hold regardless.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

DEFAULT_BUDGET = 2000

_TURN_REF = re.compile(r"#(\d+)")


@dataclass(frozen=True)
class Turn:
    index: int
    speaker: str
    text: str


@dataclass(frozen=True)
class RollingSummary:
    student_id: str
    window_start: int
    window_end: int
    text: str
    salient_snippets: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        if self.window_end < self.window_start:
            raise ValueError("window_end must be >= window_start")


def salient_turn_indices(turns: list[Turn]) -> list[int]:
    """Most recent turn plus every turn referenced by a later turn."""
    if not turns:
        return []
    indices = {turns[-1].index}
    known = {t.index for t in turns}
    for turn in turns:
        for match in _TURN_REF.finditer(turn.text):
            ref = int(match.group(1))
            if ref in known and ref < turn.index:
                indices.add(ref)
    return sorted(indices)


def update_rolling_summary(
    student_id: str,
    previous: RollingSummary | None,
    new_turns: list[Turn],
    budget: int = DEFAULT_BUDGET,
) -> RollingSummary:
    """Fold ``new_turns`` into the summary; an empty turn list is a no-op."""
    if not new_turns:
        if previous is not None:
            return previous
        return RollingSummary(student_id, 0, 0, "", ())
    ordered = sorted(new_turns, key=lambda t: t.index)
    if any(b.index <= a.index for a, b in zip(ordered, ordered[1:])):
        raise ValueError("turn indices must be strictly increasing")

    salient = salient_turn_indices(ordered)
    by_index = {t.index: t for t in ordered}

    snippets: list[tuple[int, str]] = []
    used = 0
    for idx in sorted(salient, reverse=True):
        excerpt = by_index[idx].text
        line = f"[{idx}] {excerpt}"
        if used + len(line) + 1 > budget and snippets:
            break
        if len(line) > budget:
            line = line[:budget]
            excerpt = line[len(f"[{idx}] ") :]
        snippets.append((idx, excerpt))
        used += len(line) + 1
    snippets.reverse()

    text = "\n".join(f"[{idx}] {excerpt}" for idx, excerpt in snippets)[:budget]
    window_start = min(
        ordered[0].index, previous.window_start if previous is not None else ordered[0].index
    )
    return RollingSummary(
        student_id=student_id,
        window_start=window_start,
        window_end=ordered[-1].index,
        text=text,
        salient_snippets=tuple(snippets),
    )
