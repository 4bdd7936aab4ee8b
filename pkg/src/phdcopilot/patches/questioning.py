"""Socratic questioning modes applied as plan transforms.

AskFirst prepends a clarifying question that must get a student reply before
any generation runs. AskAlways swaps direct answers for question sequences on
tasks at Analyse level and above, where accepting a fluent answer displaces
the student's own reasoning. Off is the identity.
"""

from __future__ import annotations

from dataclasses import replace

from ..orchestrator.bloom import BloomLevel
from ..orchestrator.planning import CapabilityPlan, GenerationMode, PlanStep, StepKind
from ..directives import QuestioningLevel


def questioning_transform(plan: CapabilityPlan, level: QuestioningLevel) -> CapabilityPlan:
    if level is QuestioningLevel.OFF:
        return plan

    if level is QuestioningLevel.ASK_FIRST:
        clarify = PlanStep(kind=StepKind.CLARIFY, requires_student_reply=True)
        return replace(plan, steps=(clarify,) + plan.steps)

    if level is QuestioningLevel.ASK_ALWAYS:
        if plan.route.bloom_level < BloomLevel.ANALYSE:
            return plan
        steps = tuple(
            replace(step, mode=GenerationMode.QUESTIONS_ONLY)
            if step.kind is StepKind.GENERATE
            else step
            for step in plan.steps
        )
        return replace(plan, steps=steps)

    raise ValueError(f"unknown questioning level: {level}")
