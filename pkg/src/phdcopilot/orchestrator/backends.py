"""Generation backends behind one contract.

A backend declares its capabilities and answers generate requests; given
identical (prompt, seed, budget) a conforming backend returns identical
output. The scripted mock satisfies that exactly and is the test double for
every golden-path test; the HTTP backend forwards the same contract to an
external service (POST /generate).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Protocol

from .planning import Capability
from .routing import GenerationBudget, ReasoningDepth

QUESTIONS_ONLY_MARKER = "[mode:questions-only]"


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    seed: int
    budget: GenerationBudget
    capability: Capability


@dataclass(frozen=True)
class BackendReply:
    text: str
    declared_citations: tuple[str, ...] = ()
    agreement_hint: float | None = None


class Backend(Protocol):
    def capabilities(self) -> frozenset[Capability]: ...

    def generate(self, request: GenerationRequest) -> BackendReply: ...


class BackendError(Exception):
    pass


@dataclass(frozen=True)
class ScriptRule:
    """Reply table entry: a regex over the prompt, one reply per seed slot."""

    pattern: str
    replies: tuple[str, ...]

    def matches(self, prompt: str) -> bool:
        return re.search(self.pattern, prompt, re.IGNORECASE) is not None

    def reply_for(self, seed: int) -> str:
        return self.replies[seed % len(self.replies)]


def _prompt_fingerprint(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]


class MockBackend:
    """Deterministic scripted backend.

    The first matching script rule supplies the reply (cycled by seed so
    voting paths can be exercised); unscripted prompts fall back to a reply
    derived from the prompt alone, which is therefore stable across seeds.
    The agreement hint is always neutral.
    """

    def __init__(self, script: tuple[ScriptRule, ...] = ()):
        self.script = tuple(script)
        self.calls = 0

    def capabilities(self) -> frozenset[Capability]:
        return frozenset(Capability)

    def generate(self, request: GenerationRequest) -> BackendReply:
        self.calls += 1
        prompt = request.prompt
        fingerprint = _prompt_fingerprint(prompt)

        if request.capability is Capability.WELLBEING_SCREEN:
            return BackendReply(
                text=(
                    "Reflection: it sounds like a lot is landing at once. "
                    "What felt most manageable this week, and what support made that possible? "
                    f"(screen:{fingerprint})"
                )
            )

        for rule in self.script:
            if rule.matches(prompt):
                return self._finish(prompt, rule.reply_for(request.seed), fingerprint)
        return self._finish(prompt, f"reply:{fingerprint}", fingerprint)

    def _finish(self, prompt: str, text: str, fingerprint: str) -> BackendReply:
        if QUESTIONS_ONLY_MARKER in prompt:
            text = (
                f"Before an answer, work through these ({fingerprint}): "
                "1) What is the strongest assumption behind your current approach? "
                "2) What evidence would change your conclusion? "
                "3) How would you defend this choice to a sceptical reviewer?"
            )
        cited = tuple(re.findall(r"\[source:([^\]@]+)@", prompt))
        return BackendReply(text=text, declared_citations=cited, agreement_hint=None)


class HttpBackend:
    """Forwards the generate contract to an external HTTP service."""

    def __init__(self, endpoint: str, capabilities: frozenset[Capability] | None = None):
        self.endpoint = endpoint.rstrip("/")
        self._capabilities = capabilities or frozenset({Capability.TEXT_GEN})

    def capabilities(self) -> frozenset[Capability]:
        return self._capabilities

    def generate(self, request: GenerationRequest) -> BackendReply:
        import httpx

        try:
            response = httpx.post(
                f"{self.endpoint}/generate",
                json={
                    "prompt": request.prompt,
                    "seed": request.seed,
                    "budget": {
                        "samples": request.budget.samples,
                        "reasoning_depth": request.budget.reasoning_depth.value,
                        "max_escalations": request.budget.max_escalations,
                    },
                    "capability": request.capability.value,
                },
                timeout=30.0,
            )
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise BackendError(f"backend call failed: {exc}") from exc
        payload = response.json()
        return BackendReply(
            text=payload["text"],
            declared_citations=tuple(payload.get("citations", ())),
            agreement_hint=payload.get("agreement_hint"),
        )


def create_mock_backend_app(script: tuple[ScriptRule, ...] = ()):
    """The mock exposed over HTTP with the same wire contract."""
    from fastapi import FastAPI

    app = FastAPI(title="mock generation backend")
    backend = MockBackend(script)

    @app.post("/generate")
    def generate(payload: dict) -> dict:
        budget = payload.get("budget", {})
        reply = backend.generate(
            GenerationRequest(
                prompt=payload["prompt"],
                seed=int(payload["seed"]),
                budget=GenerationBudget(
                    samples=int(budget.get("samples", 1)),
                    reasoning_depth=ReasoningDepth(budget.get("reasoning_depth", "Standard")),
                    max_escalations=int(budget.get("max_escalations", 0)),
                ),
                capability=Capability(payload.get("capability", "TextGen")),
            )
        )
        return {
            "text": reply.text,
            "citations": list(reply.declared_citations),
            "agreement_hint": reply.agreement_hint,
        }

    return app
