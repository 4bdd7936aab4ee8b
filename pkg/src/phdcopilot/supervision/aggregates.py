"""Consented aggregate signals for the GRS.

Only students with the aggregate-signals consent scope On contribute, and a
cohort below the k-anonymity minimum is suppressed outright: no value, no
count. The two shipped metrics (mean goal completion and goals-met rate) are
deliberately coarse placeholders until institutions define their own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

DEFAULT_K_MIN = 5

METRIC_MEAN_COMPLETION = "mean-goal-completion"
METRIC_ON_TRACK_RATE = "milestone-on-track-rate"


@dataclass(frozen=True)
class AggregateSignal:
    cohort_key: str
    metric: str
    value: float
    group_size: int


@dataclass(frozen=True)
class StudentProgress:
    """A consenting student's goal positions at aggregation time."""

    student_id: str
    completions: tuple[float, ...]
    thresholds: tuple[float, ...]

    @property
    def on_track(self) -> bool:
        return all(c >= t for c, t in zip(self.completions, self.thresholds))


def emit_aggregates(
    cohort_key: str,
    consenting: Iterable[StudentProgress],
    k_min: int = DEFAULT_K_MIN,
) -> list[AggregateSignal]:
    members = list(consenting)
    group_size = len(members)
    if group_size < k_min:
        return []

    all_completions = [c for m in members for c in m.completions]
    signals = [
        AggregateSignal(
            cohort_key=cohort_key,
            metric=METRIC_ON_TRACK_RATE,
            value=sum(1 for m in members if m.on_track) / group_size,
            group_size=group_size,
        )
    ]
    if all_completions:
        signals.append(
            AggregateSignal(
                cohort_key=cohort_key,
                metric=METRIC_MEAN_COMPLETION,
                value=sum(all_completions) / len(all_completions),
                group_size=group_size,
            )
        )
    return signals
