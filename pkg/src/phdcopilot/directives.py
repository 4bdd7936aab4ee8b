"""Directive vocabulary shared by the patch engine and the planner."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

GLOBAL_SCOPE = "*"


class DirectiveKind(str, Enum):
    REQUIRE_SOURCES = "RequireSources"
    PREFER_METHOD = "PreferMethod"
    SCOPE_LIMIT = "ScopeLimit"
    TONE = "Tone"
    EXCLUDE = "Exclude"
    QUESTIONING_MODE = "QuestioningMode"


class QuestioningLevel(str, Enum):
    OFF = "Off"
    ASK_FIRST = "AskFirst"
    ASK_ALWAYS = "AskAlways"


# Kinds that hold a single value per scope: a later patch on the same key
# shadows the earlier one. Cumulative kinds (sources, exclusions, scope
# limits) coexist and all apply.
SINGLE_VALUED_KINDS = frozenset(
    {DirectiveKind.TONE, DirectiveKind.QUESTIONING_MODE, DirectiveKind.PREFER_METHOD}
)


@dataclass(frozen=True)
class Directive:
    """A compiled, active constraint handed to planning and generation."""

    patch_id: str
    kind: DirectiveKind
    payload: tuple[str, ...]
    topic_key: str
    attached_at: float

    def render(self) -> str:
        return f"{self.kind.value}={','.join(self.payload)}"


@dataclass(frozen=True)
class CompiledDirectives:
    active: tuple[Directive, ...]
    shadowed: tuple[Directive, ...]

    def of_kind(self, kind: DirectiveKind) -> tuple[Directive, ...]:
        return tuple(d for d in self.active if d.kind is kind)

    def questioning_level(self) -> QuestioningLevel:
        modes = self.of_kind(DirectiveKind.QUESTIONING_MODE)
        if not modes:
            return QuestioningLevel.OFF
        return QuestioningLevel(modes[-1].payload[0])

    def excluded_sources(self) -> frozenset[str]:
        out: set[str] = set()
        for d in self.of_kind(DirectiveKind.EXCLUDE):
            out.update(d.payload)
        return frozenset(out)

    def required_sources(self) -> frozenset[str]:
        out: set[str] = set()
        for d in self.of_kind(DirectiveKind.REQUIRE_SOURCES):
            out.update(d.payload)
        return frozenset(out)
