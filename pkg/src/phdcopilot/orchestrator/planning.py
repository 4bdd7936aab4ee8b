"""Capability plans: the ordered steps a request executes.

A plan is retrieve -> ground -> generate -> verify for grounded routes, with
patch directives embedded at build time so nothing applies them "later".
Wellbeing plans contain no retrieval, no tools, and no open generation: a
screening step (when consented) and a signposting step, nothing else.
Contradictory directives fail the build loudly rather than being dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from ..canonical import digest
from ..directives import CompiledDirectives, Directive
from .routing import Route, RouteKind


class Capability(str, Enum):
    TEXT_GEN = "TextGen"
    CODE_RUN = "CodeRun"
    FIGURE_READ = "FigureRead"
    AUDIO_READ = "AudioRead"
    WELLBEING_SCREEN = "WellbeingScreen"


class StepKind(str, Enum):
    RETRIEVE = "Retrieve"
    GROUND = "Ground"
    CLARIFY = "Clarify"
    GENERATE = "Generate"
    VERIFY = "Verify"
    SCREEN = "Screen"
    SIGNPOST = "Signpost"


class GenerationMode(str, Enum):
    ANSWER = "answer"
    QUESTIONS_ONLY = "questions-only"


class PlanError(Exception):
    """A patch/route contradiction that must surface, never silently drop."""


@dataclass(frozen=True)
class PlanStep:
    kind: StepKind
    corpora: tuple[str, ...] = ()
    allowed_documents: tuple[str, ...] | None = None
    capability: Capability | None = None
    mode: GenerationMode = GenerationMode.ANSWER
    requires_student_reply: bool = False
    note: str = ""


_GENERATION_CAPABILITY = {
    RouteKind.DISCIPLINE: Capability.TEXT_GEN,
    RouteKind.POLICY: Capability.TEXT_GEN,
    RouteKind.ADMIN: Capability.TEXT_GEN,
    RouteKind.MULTIMODAL: Capability.FIGURE_READ,
}


@dataclass(frozen=True)
class CapabilityPlan:
    query: str
    route: Route
    steps: tuple[PlanStep, ...]
    directives: tuple[Directive, ...]
    shadowed: tuple[Directive, ...] = ()

    def digest(self) -> str:
        return digest(
            {
                "query": self.query,
                "route": {
                    "kind": self.route.kind.value,
                    "bloom": self.route.bloom_level.name,
                    "corpora": list(self.route.corpora),
                    "constraints": list(self.route.constraints),
                },
                "steps": [
                    {
                        "kind": s.kind.value,
                        "corpora": list(s.corpora),
                        "allowed": None if s.allowed_documents is None else list(s.allowed_documents),
                        "capability": s.capability.value if s.capability else None,
                        "mode": s.mode.value,
                    }
                    for s in self.steps
                ],
                "directives": [d.render() for d in self.directives],
            }
        )

    def step(self, kind: StepKind) -> PlanStep | None:
        for s in self.steps:
            if s.kind is kind:
                return s
        return None

    def generation_steps(self) -> tuple[PlanStep, ...]:
        return tuple(s for s in self.steps if s.kind is StepKind.GENERATE)

    def tool_steps(self) -> tuple[PlanStep, ...]:
        """Steps that execute tools or open generation; must be absent for wellbeing."""
        return tuple(
            s
            for s in self.steps
            if s.kind in (StepKind.GENERATE, StepKind.RETRIEVE)
            or s.capability in (Capability.CODE_RUN, Capability.TEXT_GEN)
        )


def build_plan(
    query: str,
    route: Route,
    compiled: CompiledDirectives,
    resolve_documents: Callable[[str], tuple[str, ...]],
    screening_consented: bool = False,
) -> CapabilityPlan:
    """Assemble the simplest capable plan for the route.

    ``resolve_documents`` maps a corpus id to its document ids, so the
    retrieval step carries an explicit allowlist with exclusions already
    applied. Requiring and excluding the same source is a contradiction and
    raises PlanError.
    """
    directives = compiled.active
    required = compiled.required_sources()
    excluded = compiled.excluded_sources()
    both = required & excluded
    if both:
        raise PlanError(
            f"directives require and exclude the same source(s): {', '.join(sorted(both))}"
        )

    if route.kind is RouteKind.WELLBEING:
        steps: list[PlanStep] = []
        if screening_consented:
            steps.append(
                PlanStep(kind=StepKind.SCREEN, capability=Capability.WELLBEING_SCREEN)
            )
        steps.append(PlanStep(kind=StepKind.SIGNPOST, note="signposting-only"))
        return CapabilityPlan(
            query=query,
            route=route,
            steps=tuple(steps),
            directives=directives,
            shadowed=compiled.shadowed,
        )

    steps = []
    if route.corpora:
        allowlist: list[str] = []
        for corpus_id in route.corpora:
            for doc_id in resolve_documents(corpus_id):
                if doc_id not in excluded:
                    allowlist.append(doc_id)
        steps.append(
            PlanStep(
                kind=StepKind.RETRIEVE,
                corpora=route.corpora,
                allowed_documents=tuple(allowlist),
            )
        )
        steps.append(PlanStep(kind=StepKind.GROUND))
    steps.append(
        PlanStep(
            kind=StepKind.GENERATE,
            capability=_GENERATION_CAPABILITY[route.kind],
        )
    )
    if route.corpora:
        steps.append(PlanStep(kind=StepKind.VERIFY, note="citation-resolution"))
    return CapabilityPlan(
        query=query,
        route=route,
        steps=tuple(steps),
        directives=directives,
        shadowed=compiled.shadowed,
    )
