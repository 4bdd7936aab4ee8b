"""The composed engine: every operation runs authorize -> do -> audit.

This is the single choke point where governance is enforced. Each mutating
operation checks the caller against the RBAC table, runs under the per-student
writer lock, emits exactly one audit event attributed to the caller, and
records the timeline facts (artefact creation, moderation transitions,
readiness updates, goal edits, patch attachments) into the student's temporal
graph. Reads are pure and unaudited. Cascaded effects the system performs on
the student's behalf (summary preparation, auto-release) are audited under the
built-in system actor.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable

from .canonical import digest
from .config import DeploymentConfig
from .context.items import ContextItem, ContextStore, ItemKind, Verification
from .context.readiness import ReadinessState
from .context.summary import RollingSummary, Turn, update_rolling_summary
from .governance.actors import Actor, ActorRegistry, Role, UnknownActorError
from .governance.audit import AuditEvent, AuditLog
from .governance.consent import ConsentRegistry, ConsentScope, ConsentState
from .governance.rbac import Decision, ResourceRef, authorize
from .orchestrator.backends import Backend, HttpBackend, MockBackend, ScriptRule
from .orchestrator.planning import CapabilityPlan, build_plan
from .orchestrator.routing import POLICY_CORPUS_ID, Route, RouteKind, classify_route
from .orchestrator.scaling import AssistantResponse, execute_plan
from .patches.engine import PatchEngine, render_patch_digest
from .patches.low_support import CheckSession, build_check_session, record_transcript
from .patches.model import (
    BehaviourPatch,
    DirectiveKind,
    GLOBAL_SCOPE,
    PolicyUpdate,
)
from .patches.practice import PracticeItem, due_list, new_practice_item, schedule_review
from .patches.questioning import questioning_transform
from .retrieval.bm25 import Bm25Index, SearchResult, index_corpus
from .retrieval.corpus import Corpus
from .retrieval.policy import ClauseConflict, DiffEntry, conflict_scan, policy_diff
from .supervision.aggregates import AggregateSignal, StudentProgress, emit_aggregates
from .supervision.goals import (
    GoalMetric,
    ProgressSummary,
    ReleaseRule,
    TaskGoal,
    crossed_upward,
    curate_summary,
    evaluate_goal,
    prepare_summary,
    release_summary,
)
from .supervision.moderation import (
    CaseState,
    ModerationCase,
    acknowledge,
    begin_review,
    close,
    return_with_feedback,
    share,
)
from .tkg.store import TemporalFact, TemporalGraph

SYSTEM_ACTOR_ID = "system"


class AuthorizationDenied(Exception):
    def __init__(self, decision: Decision, action: str, resource: ResourceRef):
        super().__init__(f"denied by rule {decision.rule}: {action} on {resource}")
        self.rule = decision.rule
        self.action = action
        self.resource = resource


class NotFoundError(Exception):
    pass


@dataclass(frozen=True)
class PatchSpec:
    """Wire-level description of a patch a supervisor attaches on return."""

    directive_kind: DirectiveKind
    payload: tuple[str, ...]
    topic_key: str = GLOBAL_SCOPE
    supersedes: str | None = None


@dataclass(frozen=True)
class QueryOutcome:
    response: AssistantResponse
    route: Route
    artefact_id: str | None
    transcript_index: int


@dataclass(frozen=True)
class TranscriptEvent:
    query: str
    seed: int
    as_of: float
    route_kind: str
    plan_digest: str
    response_text: str
    backlink_refs: tuple[str, ...]
    trace_steps: tuple[str, ...]


@dataclass
class SessionTranscript:
    session_id: str
    student_id: str
    seed: int
    events: list[TranscriptEvent] = field(default_factory=list)


class Deployment:
    def __init__(
        self,
        config: DeploymentConfig | None = None,
        clock: Callable[[], float] | None = None,
        backend: Backend | None = None,
    ):
        self.config = config or DeploymentConfig()
        self.clock = clock or time.time
        self.actors = ActorRegistry()
        self.audit = AuditLog(
            algorithm=self.config.digest_algorithm,
            path=self.config.audit_log_path,
            clock=self.clock,
        )
        self.consent = ConsentRegistry(clock=self.clock)
        self.patch_engine = PatchEngine()
        self.backend: Backend = backend or self._build_backend()
        self.evaluators: dict[str, Callable] = {}

        self._stores: dict[str, ContextStore] = {}
        self._graphs: dict[str, TemporalGraph] = {}
        self._summaries_rolling: dict[str, RollingSummary] = {}
        self._readiness: dict[str, ReadinessState] = {}
        self._goals: dict[str, TaskGoal] = {}
        self._goal_completion: dict[str, float] = {}
        self._progress_summaries: dict[str, ProgressSummary] = {}
        self._cases: dict[str, ModerationCase] = {}
        self._practice: dict[str, PracticeItem] = {}
        self._check_sessions: dict[str, CheckSession] = {}
        self._indexes: dict[str, Bm25Index] = {}
        self._policy_versions: list[Corpus] = []
        self._cohorts: dict[str, set[str]] = {"all": set()}
        self._transcripts: dict[str, SessionTranscript] = {}
        self._writers: dict[str, threading.RLock] = {}
        self._counter = 0

        self.actors.register(Actor(id=SYSTEM_ACTOR_ID, role=Role.SYSTEM))
        for actor_cfg in self.config.actors:
            actor = Actor(
                id=actor_cfg.id,
                role=Role(actor_cfg.role),
                supervisees=frozenset(actor_cfg.supervisees),
            )
            self.register_actor(actor, cohort=actor_cfg.cohort)

    # ------------------------------------------------------------------ setup

    def _build_backend(self) -> Backend:
        cfg = self.config.backend
        if cfg.mode == "http":
            if not cfg.endpoint:
                raise ValueError("http backend mode needs an endpoint")
            return HttpBackend(cfg.endpoint)
        script = tuple(ScriptRule(pattern=p, replies=r) for p, r in cfg.script)
        return MockBackend(script)

    def _next_id(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}-{self._counter}"

    def _writer(self, student_id: str) -> threading.RLock:
        return self._writers.setdefault(student_id, threading.RLock())

    def register_actor(self, actor: Actor, cohort: str | None = None) -> Actor:
        self.actors.register(actor)
        if actor.role is Role.STUDENT:
            self._stores[actor.id] = ContextStore(actor.id, clock=self.clock)
            self._graphs[actor.id] = TemporalGraph(clock=self.clock)
            self._readiness[actor.id] = ReadinessState(student_id=actor.id, as_of=self.clock())
            self._cohorts["all"].add(actor.id)
            if cohort:
                self._cohorts.setdefault(cohort, set()).add(actor.id)
        self.audit.append(
            SYSTEM_ACTOR_ID,
            "actor.registered",
            str(ResourceRef("actor", actor.id)),
            {"id": actor.id, "role": actor.role.value},
        )
        return actor

    # ----------------------------------------------------------- authorization

    def _authorize(self, actor_id: str, action: str, resource: ResourceRef) -> Actor:
        actor = self.actors.get(actor_id)  # raises UnknownActorError
        decision = authorize(actor, action, resource)
        if not decision:
            raise AuthorizationDenied(decision, action, resource)
        return actor

    def supervisor_of(self, student_id: str) -> str | None:
        for actor in self.actors.all():
            if actor.role is Role.SUPERVISOR and student_id in actor.supervisees:
                return actor.id
        return None

    def _store(self, student_id: str) -> ContextStore:
        store = self._stores.get(student_id)
        if store is None:
            raise NotFoundError(f"no student {student_id}")
        return store

    def graph(self, student_id: str) -> TemporalGraph:
        graph = self._graphs.get(student_id)
        if graph is None:
            raise NotFoundError(f"no student {student_id}")
        return graph

    def _record_fact(self, student_id: str, relation: str, obj: str) -> None:
        graph = self.graph(student_id)
        fact = TemporalFact(
            subject=student_id, relation=relation, object=obj, asserted_at=self.clock()
        )
        try:
            graph.assert_fact(fact)
        except Exception:
            # Identical fact within one clock tick: timeline already records it.
            pass

    # ------------------------------------------------------------------ consent

    def set_consent(
        self, actor_id: str, student_id: str, scope: ConsentScope, state: ConsentState
    ):
        self._authorize(actor_id, "write", ResourceRef("consent", student_id))
        with self._writer(student_id):
            record = self.consent.set(student_id, scope, state)
            self.audit.append(
                actor_id,
                "consent.set",
                str(ResourceRef("consent", student_id)),
                {"scope": scope.value, "state": state.value},
            )
            return record

    def get_consent(self, actor_id: str, student_id: str, scope: ConsentScope):
        self._authorize(actor_id, "read", ResourceRef("consent", student_id))
        return self.consent.get(student_id, scope)

    # ------------------------------------------------------------- context store

    def put_item(
        self,
        actor_id: str,
        student_id: str,
        kind: ItemKind,
        body: str,
        media_type: str = "text/plain",
        citations=(),
        tags: tuple[str, ...] = (),
        parent_id: str | None = None,
    ) -> ContextItem:
        self._authorize(actor_id, "write", ResourceRef("context-item", student_id))
        with self._writer(student_id):
            item = self._store(student_id).put_item(
                kind=kind,
                body=body,
                media_type=media_type,
                citations=tuple(citations),
                tags=tags,
                parent_id=parent_id,
            )
            self.audit.append(
                actor_id,
                "context.item-put",
                str(ResourceRef("context-item", student_id)),
                {"item_id": item.id, "kind": kind.value, "body": body},
            )
            if kind is ItemKind.ARTEFACT:
                self._record_fact(student_id, "artefact:created", item.id)
            self._reevaluate_goals(student_id)
            return item

    def tag_item(
        self, actor_id: str, student_id: str, item_id: str, tags: tuple[str, ...]
    ) -> ContextItem:
        self._authorize(actor_id, "write", ResourceRef("context-item", student_id))
        with self._writer(student_id):
            item = self._store(student_id).update_item(item_id, tags=tags)
            self.audit.append(
                actor_id,
                "context.item-tagged",
                str(ResourceRef("context-item", student_id)),
                {"item_id": item_id, "tags": list(tags)},
            )
            self._reevaluate_goals(student_id)
            return item

    def get_items(
        self,
        actor_id: str,
        student_id: str,
        kind: ItemKind | None = None,
        tag: str | None = None,
    ) -> tuple[ContextItem, ...]:
        self._authorize(actor_id, "read", ResourceRef("context-item", student_id))
        return self._store(student_id).get_items(kind=kind, tag=tag)

    def get_item(self, actor_id: str, student_id: str, item_id: str) -> ContextItem:
        self._authorize(actor_id, "read", ResourceRef("context-item", student_id))
        return self._store(student_id).get_item(item_id)

    def purge_item(self, actor_id: str, student_id: str, item_id: str) -> str:
        self._authorize(actor_id, "purge", ResourceRef("context-item", student_id))
        with self._writer(student_id):
            store = self._store(student_id)
            body = store.get_item(item_id).body
            store.purge_item(item_id)
            # The audit chain keeps only the digest of this payload; the body
            # itself is gone from every read path.
            self.audit.append(
                actor_id,
                "context.item-purged",
                str(ResourceRef("context-item", student_id)),
                {"item_id": item_id, "purged_body": body},
            )
            return item_id

    def export_items(self, actor_id: str, student_id: str) -> bytes:
        self._authorize(actor_id, "export", ResourceRef("context-item", student_id))
        return self._store(student_id).export_zip()

    def update_summary(
        self, actor_id: str, student_id: str, turns: list[Turn]
    ) -> RollingSummary:
        self._authorize(actor_id, "write", ResourceRef("context-item", student_id))
        with self._writer(student_id):
            summary = update_rolling_summary(
                student_id,
                self._summaries_rolling.get(student_id),
                turns,
                budget=self.config.summary_budget,
            )
            self._summaries_rolling[student_id] = summary
            self.audit.append(
                actor_id,
                "context.summary-updated",
                str(ResourceRef("context-item", student_id)),
                {"window": [summary.window_start, summary.window_end]},
            )
            return summary

    def update_readiness(
        self, actor_id: str, student_id: str, component: str, value: float
    ) -> ReadinessState:
        self._authorize(actor_id, "write", ResourceRef("readiness", student_id))
        with self._writer(student_id):
            now = self.clock()
            state = self._readiness[student_id].with_component(component, value, now)
            previous = self._readiness[student_id]
            self._readiness[student_id] = state
            graph = self.graph(student_id)
            relation = f"readiness:{component}"
            for fact_id, fact in enumerate(graph.facts):
                if (
                    fact.subject == student_id
                    and fact.relation == relation
                    and fact.retracted_at is None
                ):
                    graph.retract_fact(fact_id, now)
            self._record_fact(student_id, relation, repr(value))
            self.audit.append(
                actor_id,
                "readiness.updated",
                str(ResourceRef("readiness", student_id)),
                {
                    "component": component,
                    "old": getattr(previous, component),
                    "new": value,
                },
            )
            return state

    def get_readiness(self, actor_id: str, student_id: str) -> ReadinessState:
        self._authorize(actor_id, "read", ResourceRef("readiness", student_id))
        return self._readiness[student_id]

    # ---------------------------------------------------------------- retrieval

    def ingest_corpus(self, actor_id: str, corpus: Corpus) -> str:
        if corpus.corpus_class.kind == "policy":
            self._authorize(actor_id, "write", ResourceRef("policy-corpus"))
            self._policy_versions.append(corpus)
            self._indexes[POLICY_CORPUS_ID] = index_corpus(corpus)
            corpus_key = POLICY_CORPUS_ID
        else:
            student_id = corpus.corpus_class.student_id or ""
            self._authorize(actor_id, "write", ResourceRef("student-corpus", student_id))
            corpus_key = corpus.id
            self._indexes[corpus_key] = index_corpus(corpus)
        self.audit.append(
            actor_id,
            "corpus.ingested",
            str(ResourceRef("policy-corpus" if corpus_key == POLICY_CORPUS_ID else "student-corpus",
                            corpus.corpus_class.student_id or "")),
            {"corpus_id": corpus.id, "documents": [d.id for d in corpus.documents]},
        )
        return corpus_key

    def student_corpora(self, student_id: str) -> tuple[str, ...]:
        return tuple(
            sorted(
                key
                for key, index in self._indexes.items()
                if index.corpus_class.kind == "student"
                and index.corpus_class.student_id == student_id
            )
        )

    def policy_query(self, actor_id: str, text: str, k: int = 4) -> list[SearchResult]:
        """Search the policy index and nothing else, for any role."""
        self._authorize(actor_id, "read", ResourceRef("policy-corpus"))
        index = self._indexes.get(POLICY_CORPUS_ID)
        if index is None:
            return []
        assert index.corpus_class.kind == "policy"
        return index.query(text, k=k)

    def policy_documents(self, actor_id: str) -> tuple:
        self._authorize(actor_id, "read", ResourceRef("policy-corpus"))
        index = self._indexes.get(POLICY_CORPUS_ID)
        if index is None:
            return ()
        return index.corpus.documents

    def policy_conflicts(self, actor_id: str) -> tuple[list[ClauseConflict], list[str]]:
        self._authorize(actor_id, "read", ResourceRef("policy-corpus"))
        if not self._policy_versions:
            return [], []
        return conflict_scan(self._policy_versions[-1])

    def policy_changes(
        self, actor_id: str, v1: int = -2, v2: int = -1
    ) -> list[DiffEntry]:
        self._authorize(actor_id, "read", ResourceRef("policy-corpus"))
        if len(self._policy_versions) < 2:
            return []
        return policy_diff(self._policy_versions[v1], self._policy_versions[v2])

    # -------------------------------------------------------------------- goals

    def create_goal(
        self,
        actor_id: str,
        student_id: str,
        title: str,
        metric: GoalMetric,
        target: float,
        unit: str,
        threshold: float,
        release_rule: ReleaseRule = ReleaseRule.MANUAL_ONLY,
        planned_sections: tuple[str, ...] = (),
        evaluator_ref: str | None = None,
    ) -> TaskGoal:
        self._authorize(actor_id, "write", ResourceRef("goal", student_id))
        with self._writer(student_id):
            goal = TaskGoal(
                id=self._next_id("goal"),
                student_id=student_id,
                title=title,
                metric=metric,
                target=target,
                unit=unit,
                threshold=threshold,
                release_rule=release_rule,
                planned_sections=planned_sections,
                evaluator_ref=evaluator_ref,
                created_at=self.clock(),
            )
            self._goals[goal.id] = goal
            self._goal_completion[goal.id] = 0.0
            self.audit.append(
                actor_id,
                "goal.created",
                str(ResourceRef("goal", student_id)),
                {"goal_id": goal.id, "title": title, "threshold": threshold},
            )
            self._record_fact(student_id, "goal:created", goal.id)
            self._reevaluate_goals(student_id)
            return goal

    def edit_goal(
        self, actor_id: str, student_id: str, goal_id: str, field_name: str, value
    ) -> TaskGoal:
        self._authorize(actor_id, "write", ResourceRef("goal", student_id))
        with self._writer(student_id):
            goal = self._get_goal(student_id, goal_id)
            old = getattr(goal, field_name)
            updated = goal.edited(self.clock(), field_name, value)
            self._goals[goal_id] = updated
            self.audit.append(
                actor_id,
                "goal.edited",
                str(ResourceRef("goal", student_id)),
                {"goal_id": goal_id, "field": field_name, "old": old, "new": value},
            )
            self._record_fact(student_id, "goal:edited", f"{goal_id}:{field_name}")
            self._reevaluate_goals(student_id)
            return updated

    def get_goals(self, actor_id: str, student_id: str) -> tuple[TaskGoal, ...]:
        self._authorize(actor_id, "read", ResourceRef("goal", student_id))
        return tuple(
            sorted(
                (g for g in self._goals.values() if g.student_id == student_id),
                key=lambda g: g.id,
            )
        )

    def goal_completion(self, goal_id: str) -> float:
        return self._goal_completion.get(goal_id, 0.0)

    def _get_goal(self, student_id: str, goal_id: str) -> TaskGoal:
        goal = self._goals.get(goal_id)
        if goal is None or goal.student_id != student_id:
            raise NotFoundError(f"no goal {goal_id} for student {student_id}")
        return goal

    def _reevaluate_goals(self, student_id: str) -> None:
        """Crossing detection runs after every evidence mutation."""
        evidence = self._store(student_id).get_items()
        for goal in [g for g in self._goals.values() if g.student_id == student_id]:
            old = self._goal_completion.get(goal.id, 0.0)
            new = evaluate_goal(goal, evidence, evaluators=self.evaluators)
            self._goal_completion[goal.id] = new
            if crossed_upward(goal, old, new):
                self._on_threshold_cross(goal, new, evidence)

    def _on_threshold_cross(
        self, goal: TaskGoal, completion: float, evidence
    ) -> ProgressSummary:
        summary = prepare_summary(self._next_id("summary"), goal, completion, evidence)
        self._progress_summaries[summary.id] = summary
        self.audit.append(
            SYSTEM_ACTOR_ID,
            "summary.prepared",
            str(ResourceRef("summary", goal.student_id)),
            {"summary_id": summary.id, "goal_id": goal.id, "completion": completion},
        )
        self._record_fact(goal.student_id, "goal:threshold-crossed", goal.id)
        return summary

    # ---------------------------------------------------------------- summaries

    def get_summaries(self, actor_id: str, student_id: str) -> tuple[ProgressSummary, ...]:
        self._authorize(actor_id, "read", ResourceRef("summary", student_id))
        return tuple(
            sorted(
                (s for s in self._progress_summaries.values() if s.student_id == student_id),
                key=lambda s: s.id,
            )
        )

    def curate_progress_summary(
        self, actor_id: str, student_id: str, summary_id: str, narrative: str | None = None
    ) -> ProgressSummary:
        self._authorize(actor_id, "write", ResourceRef("summary", student_id))
        with self._writer(student_id):
            summary = self._get_summary(student_id, summary_id)
            curated = curate_summary(summary, student_id, narrative)
            self._progress_summaries[summary_id] = curated
            self.audit.append(
                actor_id,
                "summary.curated",
                str(ResourceRef("summary", student_id)),
                {"summary_id": summary_id},
            )
            goal = self._goals[curated.goal_id]
            if goal.release_rule is ReleaseRule.AUTO_SEND_ON_CROSS:
                released = self._try_release(curated, SYSTEM_ACTOR_ID)
                if released is not None:
                    return released
            return curated

    def release_progress_summary(
        self, actor_id: str, student_id: str, summary_id: str
    ) -> ProgressSummary:
        self._authorize(actor_id, "write", ResourceRef("summary", student_id))
        with self._writer(student_id):
            summary = self._get_summary(student_id, summary_id)
            released = self._try_release(summary, actor_id)
            if released is None:
                raise AuthorizationDenied(
                    Decision(False, "consent-required:AutoSendSummary"),
                    "release",
                    ResourceRef("summary", student_id),
                )
            return released

    def _try_release(self, summary: ProgressSummary, acting_id: str) -> ProgressSummary | None:
        """Release iff curated and consent is On at this very instant."""
        if summary.curated_by is None:
            return None
        if not self.consent.is_on(summary.student_id, ConsentScope.AUTO_SEND_SUMMARY):
            return None
        supervisor_id = self.supervisor_of(summary.student_id)
        if supervisor_id is None:
            return None
        released = release_summary(summary, supervisor_id, self.clock())
        self._progress_summaries[summary.id] = released
        self.audit.append(
            acting_id,
            "summary.released",
            str(ResourceRef("summary", summary.student_id)),
            {"summary_id": summary.id, "released_to": supervisor_id},
        )
        self._record_fact(summary.student_id, "summary:released", summary.id)
        return released

    def supervisor_summaries(
        self, actor_id: str, supervisor_id: str
    ) -> tuple[ProgressSummary, ...]:
        """Released summaries of the supervisor's own students only."""
        out = []
        for summary in self._progress_summaries.values():
            if not summary.released or summary.released_to != supervisor_id:
                continue
            self._authorize(actor_id, "read-summary", ResourceRef("summary", summary.student_id))
            out.append(summary)
        return tuple(sorted(out, key=lambda s: s.id))

    def _get_summary(self, student_id: str, summary_id: str) -> ProgressSummary:
        summary = self._progress_summaries.get(summary_id)
        if summary is None or summary.student_id != student_id:
            raise NotFoundError(f"no summary {summary_id} for student {student_id}")
        return summary

    # --------------------------------------------------------------- moderation

    def share_for_moderation(self, actor_id: str, artefact_id: str) -> ModerationCase:
        actor = self.actors.get(actor_id)
        student_id = actor.id
        self._authorize(actor_id, "share", ResourceRef("context-item", student_id))
        with self._writer(student_id):
            store = self._store(student_id)
            artefact = store.get_item(artefact_id)  # not-found if absent or purged
            for case in self._cases.values():
                if case.artefact_id == artefact_id and case.state not in (
                    CaseState.CLOSED,
                ):
                    raise ValueError(f"artefact {artefact_id} already has an open case")
            supervisor_id = self.supervisor_of(student_id)
            if supervisor_id is None:
                raise NotFoundError(f"student {student_id} has no supervisor")
            case = ModerationCase(
                id=self._next_id("case"),
                artefact_id=artefact.id,
                student_id=student_id,
                supervisor_id=supervisor_id,
            )
            case = share(case, self.clock())
            self._cases[case.id] = case
            self.audit.append(
                actor_id,
                "moderation.shared",
                str(ResourceRef("moderation-case", student_id)),
                {"case_id": case.id, "artefact_id": artefact_id},
            )
            self._record_fact(student_id, "moderation:Shared", case.id)
            return case

    def begin_case_review(self, actor_id: str, case_id: str) -> ModerationCase:
        case = self._get_case(case_id)
        self._authorize(actor_id, "review", ResourceRef("moderation-case", case.student_id))
        self._require_assigned(actor_id, case)
        with self._writer(case.student_id):
            updated = begin_review(case, self.clock())
            self._cases[case_id] = updated
            self.audit.append(
                actor_id,
                "moderation.review-started",
                str(ResourceRef("moderation-case", case.student_id)),
                {"case_id": case_id},
            )
            self._record_fact(case.student_id, "moderation:UnderReview", case_id)
            return updated

    def return_case(
        self,
        actor_id: str,
        case_id: str,
        feedback: str,
        patch: PatchSpec | None = None,
    ) -> tuple[ModerationCase, PolicyUpdate]:
        """Supervisor returns feedback, optionally attaching a behaviour patch.

        One operation, one audit event covering both the transition and the
        policy update that records the feedback/patch pair.
        """
        case = self._get_case(case_id)
        self._authorize(actor_id, "return", ResourceRef("moderation-case", case.student_id))
        self._require_assigned(actor_id, case)
        with self._writer(case.student_id):
            now = self.clock()
            patch_id: str | None = None
            if patch is not None:
                new_patch = BehaviourPatch(
                    id=self.patch_engine.next_patch_id(case.student_id),
                    author_id=actor_id,
                    student_id=case.student_id,
                    topic_key=patch.topic_key,
                    directive_kind=patch.directive_kind,
                    payload=patch.payload,
                    attached_at=now,
                )
                if patch.supersedes:
                    self.patch_engine.supersede(patch.supersedes, new_patch)
                else:
                    self.patch_engine.add_patch(new_patch)
                patch_id = new_patch.id
            update = self.patch_engine.record_update(
                PolicyUpdate(
                    id=self._next_id("update"),
                    student_id=case.student_id,
                    artefact_id=case.artefact_id,
                    feedback_text=feedback,
                    patch_id=patch_id,
                    recorded_at=now,
                )
            )
            updated = return_with_feedback(case, now, feedback, patch_id)
            self._cases[case_id] = updated
            self.audit.append(
                actor_id,
                "moderation.returned",
                str(ResourceRef("moderation-case", case.student_id)),
                {
                    "case_id": case_id,
                    "feedback": feedback,
                    "patch_id": patch_id,
                    "policy_update_id": update.id,
                },
            )
            self._record_fact(case.student_id, "moderation:Returned", case_id)
            if patch_id is not None:
                self._record_fact(case.student_id, "patch:attached", patch_id)
            return updated, update

    def acknowledge_return(self, actor_id: str, case_id: str) -> ModerationCase:
        case = self._get_case(case_id)
        self._authorize(actor_id, "acknowledge", ResourceRef("moderation-case", case.student_id))
        with self._writer(case.student_id):
            updated = acknowledge(case, self.clock())
            self._cases[case_id] = updated
            self.audit.append(
                actor_id,
                "moderation.applied",
                str(ResourceRef("moderation-case", case.student_id)),
                {"case_id": case_id},
            )
            self._record_fact(case.student_id, "moderation:Applied", case_id)
            return updated

    def close_case(self, actor_id: str, case_id: str) -> ModerationCase:
        case = self._get_case(case_id)
        self._authorize(actor_id, "close", ResourceRef("moderation-case", case.student_id))
        with self._writer(case.student_id):
            updated = close(case, self.clock())
            self._cases[case_id] = updated
            self.audit.append(
                actor_id,
                "moderation.closed",
                str(ResourceRef("moderation-case", case.student_id)),
                {"case_id": case_id},
            )
            self._record_fact(case.student_id, "moderation:Closed", case_id)
            return updated

    def supervisor_queue(self, actor_id: str, supervisor_id: str) -> tuple[ModerationCase, ...]:
        self._authorize(actor_id, "read", ResourceRef("queue", supervisor_id))
        return tuple(
            sorted(
                (
                    c
                    for c in self._cases.values()
                    if c.supervisor_id == supervisor_id
                    and c.state in (CaseState.SHARED, CaseState.UNDER_REVIEW)
                ),
                key=lambda c: (c.shared_at or 0.0, c.id),
            )
        )

    def get_case(self, actor_id: str, case_id: str) -> ModerationCase:
        case = self._get_case(case_id)
        self._authorize(actor_id, "read", ResourceRef("moderation-case", case.student_id))
        return case

    def _get_case(self, case_id: str) -> ModerationCase:
        case = self._cases.get(case_id)
        if case is None:
            raise NotFoundError(f"no case {case_id}")
        return case

    def _require_assigned(self, actor_id: str, case: ModerationCase) -> None:
        if case.supervisor_id != actor_id:
            raise AuthorizationDenied(
                Decision(False, "case-supervisor-only"),
                "review",
                ResourceRef("moderation-case", case.student_id),
            )

    # ------------------------------------------------------------------ patches

    def patch_digest(self, actor_id: str, student_id: str) -> str:
        self._authorize(actor_id, "read", ResourceRef("patch", student_id))
        patches = self.patch_engine.patches_for(student_id)
        compiled = self.patch_engine.compile(student_id, GLOBAL_SCOPE, self.clock())
        return render_patch_digest(patches, compiled)

    def compiled_directives(self, student_id: str, topic_key: str):
        return self.patch_engine.compile(student_id, topic_key, self.clock())

    # ----------------------------------------------------------------- practice

    def create_practice_item(
        self, actor_id: str, student_id: str, prompt_text: str
    ) -> PracticeItem:
        self._authorize(actor_id, "write", ResourceRef("practice-item", student_id))
        with self._writer(student_id):
            item = new_practice_item(
                self._next_id("practice"),
                student_id,
                prompt_text,
                learned_at=self.clock(),
                base_interval=self.config.practice_base_interval,
            )
            self._practice[item.id] = item
            self.audit.append(
                actor_id,
                "practice.item-created",
                str(ResourceRef("practice-item", student_id)),
                {"item_id": item.id, "due_at": item.due_at},
            )
            return item

    def review_practice_item(
        self, actor_id: str, student_id: str, item_id: str, success: bool,
        reviewed_at: float | None = None,
    ) -> PracticeItem:
        self._authorize(actor_id, "write", ResourceRef("practice-item", student_id))
        with self._writer(student_id):
            item = self._practice.get(item_id)
            if item is None or item.student_id != student_id:
                raise NotFoundError(f"no practice item {item_id}")
            updated = schedule_review(
                item,
                self.clock() if reviewed_at is None else reviewed_at,
                success,
                base_interval=self.config.practice_base_interval,
            )
            self._practice[item_id] = updated
            self.audit.append(
                actor_id,
                "practice.reviewed",
                str(ResourceRef("practice-item", student_id)),
                {"item_id": item_id, "success": success, "due_at": updated.due_at},
            )
            return updated

    def practice_due(self, actor_id: str, student_id: str) -> list[PracticeItem]:
        self._authorize(actor_id, "read", ResourceRef("practice-item", student_id))
        items = [i for i in self._practice.values() if i.student_id == student_id]
        return due_list(items)

    # --------------------------------------------------------------- low support

    def start_low_support_check(
        self, actor_id: str, student_id: str, artefact_id: str
    ) -> CheckSession:
        self._authorize(actor_id, "start", ResourceRef("check-session", student_id))
        with self._writer(student_id):
            store = self._store(student_id)
            artefact = store.get_item(artefact_id)
            decisions = store.get_items(kind=ItemKind.DECISION)
            session = build_check_session(
                self._next_id("check"), artefact, decisions, self.clock()
            )
            self._check_sessions[session.id] = session
            self.audit.append(
                actor_id,
                "check.started",
                str(ResourceRef("check-session", student_id)),
                {"session_id": session.id, "artefact_id": artefact_id,
                 "questions": len(session.questions)},
            )
            return session

    def complete_low_support_check(
        self, actor_id: str, student_id: str, session_id: str, transcript: str
    ) -> ContextItem:
        self._authorize(actor_id, "complete", ResourceRef("check-session", student_id))
        with self._writer(student_id):
            session = self._check_sessions.get(session_id)
            if session is None or session.student_id != student_id:
                raise NotFoundError(f"no check session {session_id}")
            self._check_sessions[session_id] = record_transcript(session, transcript)
            item = self._store(student_id).put_item(
                kind=ItemKind.ARTEFACT,
                body=transcript,
                tags=("low-support-check",),
                parent_id=session.artefact_id,
            )
            self.audit.append(
                actor_id,
                "check.completed",
                str(ResourceRef("check-session", student_id)),
                {"session_id": session_id, "transcript_item": item.id},
            )
            self._reevaluate_goals(student_id)
            return item

    # --------------------------------------------------------------- aggregates

    def aggregates(
        self, actor_id: str, cohort_key: str | None = None, k_min: int | None = None
    ) -> list[AggregateSignal]:
        self._authorize(actor_id, "read", ResourceRef("aggregate"))
        k = self.config.k_min if k_min is None else k_min
        cohorts = [cohort_key] if cohort_key else sorted(self._cohorts)
        signals: list[AggregateSignal] = []
        for key in cohorts:
            members = self._cohorts.get(key, set())
            consenting = []
            for student_id in sorted(members):
                if not self.consent.is_on(student_id, ConsentScope.AGGREGATE_SIGNALS):
                    continue
                goals = [g for g in self._goals.values() if g.student_id == student_id]
                consenting.append(
                    StudentProgress(
                        student_id=student_id,
                        completions=tuple(self._goal_completion.get(g.id, 0.0) for g in goals),
                        thresholds=tuple(g.threshold for g in goals),
                    )
                )
            signals.extend(emit_aggregates(key, consenting, k_min=k))
        return signals

    # -------------------------------------------------------------------- query

    def query(
        self,
        actor_id: str,
        student_id: str,
        text: str,
        seed: int | None = None,
        session_id: str | None = None,
        student_reply: str | None = None,
    ) -> QueryOutcome:
        self._authorize(actor_id, "query", ResourceRef("assistant", student_id))
        with self._writer(student_id):
            now = self.clock()
            use_seed = self.config.default_seed if seed is None else seed
            response, route, plan = self._run_pipeline(
                student_id, text, use_seed, now, student_reply
            )

            artefact_id: str | None = None
            if not response.awaiting_reply and route.kind is not RouteKind.WELLBEING:
                item = self._store(student_id).put_item(
                    kind=ItemKind.ARTEFACT,
                    body=response.text,
                    citations=response.backlinks,
                    verification=Verification.VERIFIED
                    if response.verified
                    else Verification.UNVERIFIED,
                    tags=("assistant-response", f"route:{route.kind.value.lower()}"),
                )
                artefact_id = item.id
                self._record_fact(student_id, "artefact:created", item.id)

            session_key = session_id or f"session-{student_id}"
            transcript = self._transcripts.setdefault(
                session_key,
                SessionTranscript(session_id=session_key, student_id=student_id, seed=use_seed),
            )
            transcript.events.append(
                TranscriptEvent(
                    query=text,
                    seed=use_seed,
                    as_of=now,
                    route_kind=route.kind.value,
                    plan_digest=response.plan_digest,
                    response_text=response.text,
                    backlink_refs=tuple(
                        f"{b.document_id}@{b.document_version}:{b.start}-{b.end}"
                        for b in response.backlinks
                    ),
                    trace_steps=tuple(response.trace.steps),
                )
            )
            self.audit.append(
                actor_id,
                "assistant.query",
                str(ResourceRef("assistant", student_id)),
                {
                    "query": text,
                    "route": route.kind.value,
                    "plan_digest": response.plan_digest,
                    "response_digest": digest(response.text),
                    "artefact_id": artefact_id,
                },
            )
            self._reevaluate_goals(student_id)
            return QueryOutcome(
                response=response,
                route=route,
                artefact_id=artefact_id,
                transcript_index=len(transcript.events) - 1,
            )

    def _run_pipeline(
        self,
        student_id: str,
        text: str,
        seed: int,
        as_of: float,
        student_reply: str | None,
    ) -> tuple[AssistantResponse, Route, CapabilityPlan]:
        route = classify_route(text, self.student_corpora(student_id))
        compiled = self.patch_engine.compile(student_id, route.kind.value, as_of)
        screening = self.consent.is_on(student_id, ConsentScope.WELLBEING_SCREENING)
        plan = build_plan(
            text,
            route,
            compiled,
            resolve_documents=self._resolve_documents,
            screening_consented=screening,
        )
        plan = questioning_transform(plan, compiled.questioning_level())
        response = execute_plan(
            plan,
            seed,
            self.backend,
            indexes=self._indexes,
            signposting_resources=self.config.signposting_resources,
            retrieval_k=self.config.retrieval_k,
            student_reply=student_reply,
        )
        return response, route, plan

    def _resolve_documents(self, corpus_id: str) -> tuple[str, ...]:
        index = self._indexes.get(corpus_id)
        if index is None:
            return ()
        return tuple(d.id for d in index.corpus.documents)

    # -------------------------------------------------------------- transcripts

    def transcript(self, session_id: str) -> SessionTranscript | None:
        return self._transcripts.get(session_id)

    def replay(self, transcript: SessionTranscript) -> list[tuple[int, bool, str]]:
        """Re-run a transcript's queries; True where responses match byte-for-byte.

        Replay is a dry run: it rebuilds each event's plan as of its original
        time and executes it without storing artefacts or auditing.
        """
        results = []
        for i, event in enumerate(transcript.events):
            response, _, _ = self._run_pipeline(
                transcript.student_id, event.query, event.seed, event.as_of, None
            )
            results.append((i, response.text == event.response_text, response.text))
        return results

    # -------------------------------------------------------------------- audit

    def audit_events_for(self, actor_id: str) -> tuple[AuditEvent, ...]:
        """Events whose resource the actor may read, plus their own actions."""
        actor = self.actors.get(actor_id)
        out = []
        for event in self.audit.events:
            if event.actor_id == actor_id:
                out.append(event)
                continue
            kind, _, owner = event.resource.partition(":")
            if authorize(actor, "read", ResourceRef(kind, owner)):
                out.append(event)
        return tuple(out)

    def verify_audit(self, actor_id: str):
        self._authorize(actor_id, "verify", ResourceRef("audit-log"))
        return self.audit.verify()
