"""Actors and roles.

Three human roles hold claims in the workflow (Student, Supervisor, GRS); the
assistant itself acts under the System role and is never a stakeholder.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Role(str, Enum):
    STUDENT = "Student"
    SUPERVISOR = "Supervisor"
    GRS = "GRS"
    SYSTEM = "System"


class UnknownActorError(Exception):
    """Actor id is not registered; distinct from an authorization Deny."""


@dataclass(frozen=True)
class Actor:
    id: str
    role: Role
    supervisees: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.role is not Role.SUPERVISOR and self.supervisees:
            raise ValueError("only supervisors carry supervisees")


class ActorRegistry:
    def __init__(self) -> None:
        self._actors: dict[str, Actor] = {}

    def register(self, actor: Actor) -> Actor:
        if actor.id in self._actors:
            raise ValueError(f"actor id already registered: {actor.id}")
        self._actors[actor.id] = actor
        return actor

    def get(self, actor_id: str) -> Actor:
        try:
            return self._actors[actor_id]
        except KeyError:
            raise UnknownActorError(f"unknown actor: {actor_id}") from None

    def __contains__(self, actor_id: str) -> bool:
        return actor_id in self._actors

    def all(self) -> tuple[Actor, ...]:
        return tuple(self._actors.values())
