"""Retrieval-practice scheduling with doubling intervals.

A successful review pushes the next due date out by base * 2^k (k the new
interval index); a failed one resets to the base interval. With a one-day base
and reviews on their due days, an item lands on days 1, 3, 7, 15, ...
Reviews before the due date are rejected, which is what keeps due dates
strictly increasing across an item's history.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

DEFAULT_BASE_INTERVAL = 1.0  # days


@dataclass(frozen=True)
class PracticeItem:
    id: str
    student_id: str
    prompt_text: str
    learned_at: float
    due_at: float
    interval_index: int = 0


def new_practice_item(
    item_id: str,
    student_id: str,
    prompt_text: str,
    learned_at: float,
    base_interval: float = DEFAULT_BASE_INTERVAL,
) -> PracticeItem:
    return PracticeItem(
        id=item_id,
        student_id=student_id,
        prompt_text=prompt_text,
        learned_at=learned_at,
        due_at=learned_at + base_interval,
        interval_index=0,
    )


def schedule_review(
    item: PracticeItem,
    reviewed_at: float,
    success: bool,
    base_interval: float = DEFAULT_BASE_INTERVAL,
) -> PracticeItem:
    if reviewed_at < item.due_at:
        raise ValueError(
            f"item {item.id} is due at {item.due_at:g}; review at {reviewed_at:g} is early"
        )
    if success:
        index = item.interval_index + 1
        due = reviewed_at + base_interval * (2**index)
    else:
        index = 0
        due = reviewed_at + base_interval
    return replace(item, interval_index=index, due_at=due)


def due_list(items: Iterable[PracticeItem], as_of: float | None = None) -> list[PracticeItem]:
    """Items ordered by due date (topics interleave naturally)."""
    ordered = sorted(items, key=lambda i: (i.due_at, i.id))
    if as_of is None:
        return ordered
    return [i for i in ordered if i.due_at <= as_of]
