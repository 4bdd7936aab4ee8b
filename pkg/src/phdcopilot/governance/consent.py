"""Student consent records: revocable, scoped, and off by default.

Release paths re-check consent at the instant of release, so a revocation
between a trigger and its release blocks the release.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable


class ConsentScope(str, Enum):
    AUTO_SEND_SUMMARY = "AutoSendSummary"
    AGGREGATE_SIGNALS = "AggregateSignals"
    WELLBEING_SCREENING = "WellbeingScreening"


class ConsentState(str, Enum):
    OFF = "Off"
    ON = "On"


@dataclass(frozen=True)
class ConsentRecord:
    student_id: str
    scope: ConsentScope
    state: ConsentState
    updated_at: float


class ConsentRegistry:
    """Latest-write-wins consent store; every scope defaults to Off."""

    def __init__(self, clock: Callable[[], float]):
        self._clock = clock
        self._records: dict[tuple[str, ConsentScope], ConsentRecord] = {}

    def get(self, student_id: str, scope: ConsentScope) -> ConsentRecord:
        key = (student_id, scope)
        if key not in self._records:
            return ConsentRecord(student_id, scope, ConsentState.OFF, 0.0)
        return self._records[key]

    def set(self, student_id: str, scope: ConsentScope, state: ConsentState) -> ConsentRecord:
        record = ConsentRecord(student_id, scope, state, self._clock())
        self._records[(student_id, scope)] = record
        return record

    def is_on(self, student_id: str, scope: ConsentScope) -> bool:
        return self.get(student_id, scope).state is ConsentState.ON
