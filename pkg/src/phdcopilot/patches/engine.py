"""Patch storage and directive compilation.

Compilation is a pure function of (patch set, scope, as-of time): it gathers
every non-superseded patch matching the student (global scope first, then the
topic, each oldest-first) and resolves conflicts on single-valued kinds by
last-writer-wins. Losers are returned as shadowed, never dropped, so the
student-facing digest can show the full picture.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from .model import (
    BehaviourPatch,
    CompiledDirectives,
    Directive,
    GLOBAL_SCOPE,
    PolicyUpdate,
)


class PatchEngine:
    def __init__(self) -> None:
        self._patches: dict[str, BehaviourPatch] = {}
        self._updates: list[PolicyUpdate] = []
        self._counter = 0

    @property
    def updates(self) -> tuple[PolicyUpdate, ...]:
        return tuple(self._updates)

    def patches_for(self, student_id: str) -> tuple[BehaviourPatch, ...]:
        return tuple(
            sorted(
                (p for p in self._patches.values() if p.student_id == student_id),
                key=lambda p: (p.attached_at, p.id),
            )
        )

    def next_patch_id(self, student_id: str) -> str:
        self._counter += 1
        return f"patch-{student_id}-{self._counter}"

    def add_patch(self, patch: BehaviourPatch) -> BehaviourPatch:
        if patch.id in self._patches:
            raise ValueError(f"patch id already exists: {patch.id}")
        self._patches[patch.id] = patch
        return patch

    def supersede(self, old_patch_id: str, new_patch: BehaviourPatch) -> BehaviourPatch:
        old = self._patches[old_patch_id]
        if old.student_id != new_patch.student_id:
            raise ValueError("a patch can only be superseded within its student scope")
        self.add_patch(new_patch)
        self._patches[old_patch_id] = replace(old, superseded_by=new_patch.id)
        return new_patch

    def record_update(self, update: PolicyUpdate) -> PolicyUpdate:
        self._updates.append(update)
        return update

    def compile(self, student_id: str, topic_key: str, as_of: float) -> CompiledDirectives:
        matching = [
            p
            for p in self._patches.values()
            if p.student_id == student_id
            and p.superseded_by is None
            and p.attached_at <= as_of
            and p.topic_key in (GLOBAL_SCOPE, topic_key)
        ]

        # Last writer wins per conflict key; everything it displaces is shadowed.
        winners: dict[str, BehaviourPatch] = {}
        shadowed: list[BehaviourPatch] = []
        for patch in matching:
            key = patch.conflict_key
            if key is None:
                continue
            current = winners.get(key)
            if current is None:
                winners[key] = patch
            elif (patch.attached_at, patch.id) > (current.attached_at, current.id):
                shadowed.append(current)
                winners[key] = patch
            else:
                shadowed.append(patch)

        active = [p for p in matching if p.conflict_key is None or winners[p.conflict_key] is p]

        def ordering(p: BehaviourPatch) -> tuple[int, float, str]:
            return (0 if p.topic_key == GLOBAL_SCOPE else 1, p.attached_at, p.id)

        return CompiledDirectives(
            active=tuple(_directive(p) for p in sorted(active, key=ordering)),
            shadowed=tuple(_directive(p) for p in sorted(shadowed, key=ordering)),
        )


def _directive(patch: BehaviourPatch) -> Directive:
    return Directive(
        patch_id=patch.id,
        kind=patch.directive_kind,
        payload=patch.payload,
        topic_key=patch.topic_key,
        attached_at=patch.attached_at,
    )


def render_patch_digest(
    patches: Iterable[BehaviourPatch], compiled: CompiledDirectives
) -> str:
    """Human-readable "what rules are shaping my assistant?" view."""
    lines = ["Rules currently shaping your assistant:"]
    if not compiled.active:
        lines.append("  (none)")
    for d in compiled.active:
        scope = "all topics" if d.topic_key == GLOBAL_SCOPE else f"topic {d.topic_key}"
        lines.append(f"  - [{d.patch_id}] {d.render()} ({scope})")
    if compiled.shadowed:
        lines.append("Superseded by a later rule:")
        for d in compiled.shadowed:
            lines.append(f"  - [{d.patch_id}] {d.render()}")
    inactive = [p for p in patches if p.superseded_by is not None]
    if inactive:
        lines.append("Retired:")
        for p in inactive:
            lines.append(f"  - [{p.id}] replaced by {p.superseded_by}")
    return "\n".join(lines)
