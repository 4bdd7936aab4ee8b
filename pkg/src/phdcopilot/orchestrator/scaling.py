"""Inference-time scaling: sampling, self-consistency voting, escalation.

Harder prompts get more samples; when the vote is weak (< 2/3 agreement) and
escalations remain, the budget grows: +2 samples first, Extended depth on the
second escalation, then samples again. Previously drawn samples are kept
(sample i is always seeded seed+i), so an escalation adds only the new calls.
If escalations run out without a 2/3 majority the modal answer is still
returned but flagged contested for human review.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

from ..retrieval.bm25 import Bm25Index, SearchResult, SourceBacklink
from .backends import Backend, BackendError, BackendReply, GenerationRequest, QUESTIONS_ONLY_MARKER
from .planning import Capability, CapabilityPlan, GenerationMode, PlanStep, StepKind
from .routing import ReasoningDepth, RouteKind

AGREEMENT_NUMERATOR = 2
AGREEMENT_DENOMINATOR = 3

DEFAULT_RETRIEVAL_K = 4

_PUNCT = re.compile(r"[^\w\s]")
_SPACE = re.compile(r"\s+")


def canonicalize(text: str) -> str:
    """Voting key: lowercase, punctuation stripped, whitespace collapsed."""
    return _SPACE.sub(" ", _PUNCT.sub("", text.lower())).strip()


@dataclass(frozen=True)
class VoteResult:
    winner_text: str
    winner_index: int
    modal_count: int
    total: int
    tally: tuple[tuple[str, int], ...]

    @property
    def agreement_ratio(self) -> float:
        return self.modal_count / self.total


def self_consistency(responses: list[str]) -> VoteResult:
    """Modal canonicalized response; ties break to the lowest sample index."""
    if not responses:
        raise ValueError("voting needs at least one response")
    counts: dict[str, int] = {}
    first_index: dict[str, int] = {}
    for i, text in enumerate(responses):
        key = canonicalize(text)
        counts[key] = counts.get(key, 0) + 1
        first_index.setdefault(key, i)
    winner_key = max(counts, key=lambda k: (counts[k], -first_index[k]))
    idx = first_index[winner_key]
    return VoteResult(
        winner_text=responses[idx],
        winner_index=idx,
        modal_count=counts[winner_key],
        total=len(responses),
        tally=tuple(sorted(counts.items(), key=lambda kv: first_index[kv[0]])),
    )


def agreement_needed(samples: int) -> int:
    return math.ceil(AGREEMENT_NUMERATOR * samples / AGREEMENT_DENOMINATOR)


@dataclass(frozen=True)
class SampleTrace:
    index: int
    seed: int
    depth: ReasoningDepth
    text: str


@dataclass(frozen=True)
class VoteTrace:
    samples: int
    modal_count: int
    needed: int


@dataclass
class Trace:
    steps: list[str] = field(default_factory=list)
    retrieved: list[str] = field(default_factory=list)
    samples: list[SampleTrace] = field(default_factory=list)
    votes: list[VoteTrace] = field(default_factory=list)
    escalations: list[str] = field(default_factory=list)

    def backend_calls(self) -> int:
        return len(self.samples)


class GenerationError(Exception):
    def __init__(self, message: str, trace: Trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class AssistantResponse:
    text: str
    backlinks: tuple[SourceBacklink, ...]
    trace: Trace
    agreement_ratio: float
    contested: bool
    verified: bool
    plan_digest: str
    awaiting_reply: bool = False


def _render_signposting(resources: tuple[str, ...]) -> str:
    lines = ["Support options (human, confidential):"]
    lines.extend(f"- {r}" for r in resources)
    lines.append("If anything feels unsafe, contact the crisis line above now.")
    return "\n".join(lines)


def _render_prompt(
    plan: CapabilityPlan,
    grounding: list[SearchResult],
    mode: GenerationMode,
    student_reply: str | None,
) -> str:
    route = plan.route
    lines = [f"[route:{route.kind.value}|bloom:{route.bloom_level.label}]"]
    for d in plan.directives:
        lines.append(f"[directive:{d.patch_id}:{d.render()}]")
    if mode is GenerationMode.QUESTIONS_ONLY:
        lines.append(QUESTIONS_ONLY_MARKER)
    if student_reply is not None:
        lines.append(f"[student-reply] {student_reply}")
    lines.append(f"[query] {plan.query}")
    for result in grounding:
        b = result.backlink
        lines.append(
            f"[source:{b.document_id}@{b.document_version}:{b.start}-{b.end}] {result.passage_text}"
        )
    return "\n".join(lines)


def _retrieve(
    plan: CapabilityPlan,
    step: PlanStep,
    indexes: dict[str, Bm25Index],
    k: int,
    required_sources: frozenset[str],
) -> list[SearchResult]:
    allowed = None if step.allowed_documents is None else set(step.allowed_documents)
    results: list[SearchResult] = []
    for corpus_id in step.corpora:
        index = indexes.get(corpus_id)
        if index is None:
            continue
        results.extend(index.query(plan.query, k=k, allowed_documents=allowed))
    results.sort(key=lambda r: (-r.score, r.backlink.document_id, r.backlink.start))
    results = results[:k]

    # A RequireSources directive guarantees grounding from those documents even
    # when they would not surface in the top-k on score alone.
    present = {r.backlink.document_id for r in results}
    for doc_id in sorted(required_sources - present):
        if allowed is not None and doc_id not in allowed:
            continue
        for corpus_id in step.corpora:
            index = indexes.get(corpus_id)
            if index is None:
                continue
            scoped = index.query(plan.query, k=1, allowed_documents={doc_id})
            if not scoped:
                for passage in index.passages:
                    if passage.document_id == doc_id:
                        scoped = [
                            SearchResult(
                                passage_text=passage.text,
                                backlink=SourceBacklink(
                                    document_id=passage.document_id,
                                    start=passage.start,
                                    end=passage.end,
                                    document_version=index.corpus.document(doc_id).version,
                                    quoted_text=passage.text,
                                ),
                                score=0.0,
                            )
                        ]
                        break
            if scoped:
                results.extend(scoped)
                break
    return results


def execute_plan(
    plan: CapabilityPlan,
    seed: int,
    backend: Backend,
    indexes: dict[str, Bm25Index] | None = None,
    signposting_resources: tuple[str, ...] = (),
    retrieval_k: int = DEFAULT_RETRIEVAL_K,
    student_reply: str | None = None,
) -> AssistantResponse:
    """Run the plan's steps in order and return the assistant response.

    Stateless given (plan, seed): identical inputs give identical responses
    with a deterministic backend.
    """
    indexes = indexes or {}
    trace = Trace()
    plan_digest = plan.digest()

    if plan.route.kind is RouteKind.WELLBEING:
        parts: list[str] = []
        for step in plan.steps:
            trace.steps.append(step.kind.value)
            if step.kind is StepKind.SCREEN:
                reply = _generate_one(
                    backend,
                    _render_prompt(plan, [], GenerationMode.ANSWER, None),
                    seed,
                    plan,
                    Capability.WELLBEING_SCREEN,
                    ReasoningDepth.STANDARD,
                    trace,
                )
                parts.append(reply.text)
            elif step.kind is StepKind.SIGNPOST:
                parts.append(_render_signposting(signposting_resources))
        return AssistantResponse(
            text="\n".join(parts),
            backlinks=(),
            trace=trace,
            agreement_ratio=1.0,
            contested=False,
            verified=False,
            plan_digest=plan_digest,
        )

    grounding: list[SearchResult] = []
    mode = GenerationMode.ANSWER
    for step in plan.steps:
        if step.kind is StepKind.RETRIEVE:
            trace.steps.append(step.kind.value)
            compiled_required = frozenset()
            for d in plan.directives:
                if d.kind.value == "RequireSources":
                    compiled_required = compiled_required | frozenset(d.payload)
            grounding = _retrieve(plan, step, indexes, retrieval_k, compiled_required)
            trace.retrieved.extend(
                f"{r.backlink.document_id}@{r.backlink.document_version}:"
                f"{r.backlink.start}-{r.backlink.end}"
                for r in grounding
            )
        elif step.kind is StepKind.CLARIFY:
            trace.steps.append(step.kind.value)
            if student_reply is None:
                question = (
                    "Before I answer: what outcome are you after here, and what have "
                    f"you already tried? (re: {plan.query})"
                )
                return AssistantResponse(
                    text=question,
                    backlinks=(),
                    trace=trace,
                    agreement_ratio=1.0,
                    contested=False,
                    verified=False,
                    plan_digest=plan_digest,
                    awaiting_reply=True,
                )
        elif step.kind is StepKind.GROUND:
            trace.steps.append(step.kind.value)
        elif step.kind is StepKind.GENERATE:
            trace.steps.append(step.kind.value)
            mode = step.mode
            prompt = _render_prompt(plan, grounding, mode, student_reply)
            text, agreement, contested = _generate_with_escalation(
                backend, prompt, seed, plan, step.capability or Capability.TEXT_GEN, trace
            )
            backlinks = tuple(r.backlink for r in grounding)
            verified = False
            if plan.step(StepKind.VERIFY) is not None:
                trace.steps.append(StepKind.VERIFY.value)
                verified = bool(backlinks) and all(
                    _verify_backlink(b, indexes) for b in backlinks
                )
            return AssistantResponse(
                text=text,
                backlinks=backlinks,
                trace=trace,
                agreement_ratio=agreement,
                contested=contested,
                verified=verified,
                plan_digest=plan_digest,
            )
    raise GenerationError("plan contained no generation step", trace)


def _verify_backlink(backlink: SourceBacklink, indexes: dict[str, Bm25Index]) -> bool:
    for index in indexes.values():
        try:
            doc = index.corpus.document(backlink.document_id)
        except KeyError:
            continue
        if doc.version != backlink.document_version:
            continue
        return doc.body[backlink.start : backlink.end] == backlink.quoted_text
    return False


def _generate_one(
    backend: Backend,
    prompt: str,
    seed: int,
    plan: CapabilityPlan,
    capability: Capability,
    depth: ReasoningDepth,
    trace: Trace,
) -> BackendReply:
    budget = replace(plan.route.budget, reasoning_depth=depth)
    try:
        reply = backend.generate(
            GenerationRequest(prompt=prompt, seed=seed, budget=budget, capability=capability)
        )
    except BackendError as exc:
        raise GenerationError(str(exc), trace) from exc
    trace.samples.append(
        SampleTrace(index=len(trace.samples), seed=seed, depth=depth, text=reply.text)
    )
    return reply


def _generate_with_escalation(
    backend: Backend,
    prompt: str,
    seed: int,
    plan: CapabilityPlan,
    capability: Capability,
    trace: Trace,
) -> tuple[str, float, bool]:
    budget = plan.route.budget
    depth = budget.reasoning_depth
    target = budget.samples
    escalations_used = 0
    replies: list[BackendReply] = []

    while True:
        while len(replies) < target:
            idx = len(replies)
            reply = _generate_one(backend, prompt, seed + idx, plan, capability, depth, trace)
            replies.append(reply)
        vote = self_consistency([r.text for r in replies])
        needed = agreement_needed(target)
        trace.votes.append(VoteTrace(samples=target, modal_count=vote.modal_count, needed=needed))
        if vote.modal_count >= needed:
            return vote.winner_text, vote.agreement_ratio, False
        if escalations_used >= budget.max_escalations:
            return vote.winner_text, vote.agreement_ratio, True
        escalations_used += 1
        if escalations_used == 2 and depth is ReasoningDepth.STANDARD:
            depth = ReasoningDepth.EXTENDED
            replies = []
            trace.escalations.append(f"depth->{depth.value} at {target} samples")
        else:
            target += 2
            trace.escalations.append(f"samples->{target}")
