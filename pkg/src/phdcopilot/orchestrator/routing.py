"""Transparent route classification.

Routing is a fixed rule cascade over keyword sets, checked in priority order:
wellbeing signals first (they must never fall through to generation), then
policy, multimodal, admin, and discipline as the default. A rule cascade is
deliberately auditable; a learned classifier can slot in behind the same
interface later.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .bloom import BloomLevel, classify_bloom

POLICY_CORPUS_ID = "policy"
SIGNPOSTING_ONLY = "signposting-only"

RULESET_VERSION = 1


class RouteKind(str, Enum):
    DISCIPLINE = "Discipline"
    POLICY = "Policy"
    MULTIMODAL = "Multimodal"
    WELLBEING = "Wellbeing"
    ADMIN = "Admin"


class ReasoningDepth(str, Enum):
    STANDARD = "Standard"
    EXTENDED = "Extended"


@dataclass(frozen=True)
class GenerationBudget:
    samples: int = 1
    reasoning_depth: ReasoningDepth = ReasoningDepth.STANDARD
    max_escalations: int = 0

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.samples % 2 == 0:
            raise ValueError("samples must be odd so votes cannot deadlock")
        if self.max_escalations < 0:
            raise ValueError("max_escalations must be >= 0")


@dataclass(frozen=True)
class Route:
    kind: RouteKind
    bloom_level: BloomLevel
    corpora: tuple[str, ...]
    constraints: tuple[str, ...]
    budget: GenerationBudget

    def __post_init__(self) -> None:
        if self.kind is RouteKind.WELLBEING and SIGNPOSTING_ONLY not in self.constraints:
            raise ValueError("wellbeing routes must carry the signposting-only constraint")
        if self.kind is RouteKind.POLICY and self.corpora != (POLICY_CORPUS_ID,):
            raise ValueError("policy routes search exactly the policy index")


# Emotional-state phrases; matched as substrings of the lowercased query.
WELLBEING_MARKERS = (
    "overwhelmed",
    "can't sleep",
    "cannot sleep",
    "can not sleep",
    "anxious",
    "anxiety",
    "depressed",
    "depression",
    "burnout",
    "burnt out",
    "burned out",
    "hopeless",
    "lonely",
    "isolated",
    "panic",
    "self-harm",
    "suicid",
    "mental health",
    "wellbeing",
    "well-being",
    "struggling to cope",
    "exhausted",
    "feeling down",
    "stressed",
)

POLICY_MARKERS = (
    "policy",
    "policies",
    "regulation",
    "regulations",
    "grs",
    "candidature",
    "annual review",
    "annual leave",
    "extension",
    "intermission",
    "integrity",
    "compliance",
    "misconduct",
    "confirmation requirements",
)

MULTIMODAL_MARKERS = (
    "figure",
    "image",
    "diagram",
    "chart",
    "plot",
    "audio",
    "video",
    "screenshot",
    "photo",
    "recording",
    "spectrogram",
)

ADMIN_MARKERS = (
    "form",
    "forms",
    "paperwork",
    "enrol",
    "enrolment",
    "enrollment",
    "register",
    "calendar",
    "reminder",
    "timesheet",
    "admin",
)

_WORDLIKE = re.compile(r"^[\w-]+$")


def _matches(text: str, markers: tuple[str, ...]) -> bool:
    for marker in markers:
        if _WORDLIKE.match(marker):
            if re.search(r"\b" + re.escape(marker), text):
                return True
        elif marker in text:
            return True
    return False


def budget_for(kind: RouteKind, level: BloomLevel) -> GenerationBudget:
    """Compute scales with task difficulty: harder levels get more samples."""
    if kind is RouteKind.WELLBEING:
        return GenerationBudget(samples=1, max_escalations=0)
    if level >= BloomLevel.ANALYSE:
        return GenerationBudget(samples=3, max_escalations=2)
    return GenerationBudget(samples=1, max_escalations=1)


def classify_route(query: str, student_corpora: tuple[str, ...] = ()) -> Route:
    """Map a query to exactly one route; the fallback is Discipline/Understand."""
    if not query or not query.strip():
        raise ValueError("query must be non-empty")
    text = query.lower()
    level = classify_bloom(query)

    if _matches(text, WELLBEING_MARKERS):
        return Route(
            kind=RouteKind.WELLBEING,
            bloom_level=level,
            corpora=(),
            constraints=(SIGNPOSTING_ONLY,),
            budget=budget_for(RouteKind.WELLBEING, level),
        )
    if _matches(text, POLICY_MARKERS):
        return Route(
            kind=RouteKind.POLICY,
            bloom_level=level,
            corpora=(POLICY_CORPUS_ID,),
            constraints=(),
            budget=budget_for(RouteKind.POLICY, level),
        )
    if _matches(text, MULTIMODAL_MARKERS):
        return Route(
            kind=RouteKind.MULTIMODAL,
            bloom_level=level,
            corpora=tuple(student_corpora),
            constraints=(),
            budget=budget_for(RouteKind.MULTIMODAL, level),
        )
    if _matches(text, ADMIN_MARKERS):
        return Route(
            kind=RouteKind.ADMIN,
            bloom_level=level,
            corpora=(POLICY_CORPUS_ID,),
            constraints=(),
            budget=budget_for(RouteKind.ADMIN, level),
        )
    return Route(
        kind=RouteKind.DISCIPLINE,
        bloom_level=level,
        corpora=tuple(student_corpora),
        constraints=(),
        budget=budget_for(RouteKind.DISCIPLINE, level),
    )
