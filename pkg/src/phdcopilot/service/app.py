"""HTTP surface binding the engine's operations to endpoints.

Every handler resolves the caller from a bearer token, delegates to the
deployment facade (which owns authorization and auditing), and serializes the
result. Errors use one envelope: {code, rule, message}; authorization failures
name the violated rule and never include item bodies.
"""

from __future__ import annotations

from typing import Any

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse

from ..context.items import ItemKind, ItemNotFoundError
from ..deployment import (
    AuthorizationDenied,
    Deployment,
    NotFoundError,
    PatchSpec,
)
from ..governance.actors import UnknownActorError
from ..governance.consent import ConsentScope, ConsentState
from ..orchestrator.planning import PlanError
from ..patches.model import DirectiveKind
from ..retrieval.corpus import Corpus, CorpusClass, Document
from ..supervision.goals import GoalMetric, ReleaseRule
from ..supervision.moderation import IllegalTransitionError


def _error(status: int, code: str, rule: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"code": code, "rule": rule, "message": message}
    )


def _serialize_item(item) -> dict[str, Any]:
    return {
        "id": item.id,
        "student_id": item.student_id,
        "kind": item.kind.value,
        "body": item.body,
        "media_type": item.media_type,
        "citations": [_serialize_backlink(c) for c in item.citations],
        "verification": item.verification.value,
        "tags": list(item.tags),
        "parent_id": item.parent_id,
        "created_at": item.created_at,
        "updated_at": item.updated_at,
        "retention": item.retention.value,
    }


def _serialize_backlink(b) -> dict[str, Any]:
    return {
        "document_id": b.document_id,
        "start": b.start,
        "end": b.end,
        "document_version": b.document_version,
        "quoted_text": b.quoted_text,
    }


def _serialize_case(case) -> dict[str, Any]:
    return {
        "id": case.id,
        "artefact_id": case.artefact_id,
        "student_id": case.student_id,
        "supervisor_id": case.supervisor_id,
        "state": case.state.value,
        "shared_at": case.shared_at,
        "returned_at": case.returned_at,
        "closed_at": case.closed_at,
        "feedback": case.feedback,
        "patch_id": case.patch_id,
        "history": [s.value for s in case.history],
    }


def _serialize_summary(summary) -> dict[str, Any]:
    return {
        "id": summary.id,
        "goal_id": summary.goal_id,
        "student_id": summary.student_id,
        "completion": summary.completion,
        "narrative": summary.narrative,
        "artefact_links": list(summary.artefact_links),
        "curated_by": summary.curated_by,
        "released_to": summary.released_to,
        "released_at": summary.released_at,
    }


def _serialize_goal(goal) -> dict[str, Any]:
    return {
        "id": goal.id,
        "student_id": goal.student_id,
        "title": goal.title,
        "metric": goal.metric.value,
        "target": goal.target,
        "unit": goal.unit,
        "threshold": goal.threshold,
        "release_rule": goal.release_rule.value,
        "planned_sections": list(goal.planned_sections),
        "created_at": goal.created_at,
        "edits": [
            {"at": e.at, "field": e.field, "old": e.old, "new": e.new} for e in goal.edits
        ],
    }


def create_app(
    deployment: Deployment, tokens: dict[str, str], console_dist: str | None = None
) -> FastAPI:
    app = FastAPI(title="phdcopilot", version="0.1.0")

    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["Authorization", "Content-Type"],
    )

    if console_dist:
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=console_dist, html=True), name="console")

    def caller(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise UnknownActorError("missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        actor_id = tokens.get(token)
        if actor_id is None:
            raise UnknownActorError("unrecognized token")
        return actor_id

    @app.exception_handler(AuthorizationDenied)
    async def _denied(_req: Request, exc: AuthorizationDenied):
        return _error(403, "forbidden", exc.rule, f"denied by rule {exc.rule}")

    @app.exception_handler(UnknownActorError)
    async def _unknown(_req: Request, exc: UnknownActorError):
        return _error(401, "unknown-actor", "actor-registration", str(exc))

    @app.exception_handler(NotFoundError)
    async def _missing(_req: Request, exc: NotFoundError):
        return _error(404, "not-found", "", str(exc))

    @app.exception_handler(ItemNotFoundError)
    async def _missing_item(_req: Request, exc: ItemNotFoundError):
        return _error(404, "not-found", "", str(exc))

    @app.exception_handler(IllegalTransitionError)
    async def _illegal(_req: Request, exc: IllegalTransitionError):
        return _error(409, "illegal-transition", "moderation-state-machine", str(exc))

    @app.exception_handler(PlanError)
    async def _plan_error(_req: Request, exc: PlanError):
        return _error(422, "plan-contradiction", "directive-consistency", str(exc))

    @app.exception_handler(ValueError)
    async def _invalid(_req: Request, exc: ValueError):
        return _error(400, "invalid", "", str(exc))

    # ---------------------------------------------------------------- queries

    @app.post("/students/{student_id}/query")
    def post_query(student_id: str, payload: dict, actor: str = Depends(caller)):
        outcome = deployment.query(
            actor,
            student_id,
            payload["text"],
            seed=payload.get("seed"),
            session_id=payload.get("session_id"),
            student_reply=payload.get("student_reply"),
        )
        response = outcome.response
        return {
            "text": response.text,
            "backlinks": [_serialize_backlink(b) for b in response.backlinks],
            "route": outcome.route.kind.value,
            "bloom_level": outcome.route.bloom_level.label,
            "artefact_id": outcome.artefact_id,
            "plan_digest": response.plan_digest,
            "agreement_ratio": response.agreement_ratio,
            "contested": response.contested,
            "verified": response.verified,
            "awaiting_reply": response.awaiting_reply,
            "trace": {
                "steps": list(response.trace.steps),
                "retrieved": list(response.trace.retrieved),
                "samples": len(response.trace.samples),
                "escalations": list(response.trace.escalations),
            },
        }

    # ------------------------------------------------------------ context items

    @app.get("/students/{student_id}/context/items")
    def list_items(
        student_id: str,
        kind: str | None = Query(default=None),
        tag: str | None = Query(default=None),
        actor: str = Depends(caller),
    ):
        items = deployment.get_items(
            actor, student_id, kind=ItemKind(kind) if kind else None, tag=tag
        )
        return {"items": [_serialize_item(i) for i in items]}

    @app.post("/students/{student_id}/context/items")
    def post_item(student_id: str, payload: dict, actor: str = Depends(caller)):
        item = deployment.put_item(
            actor,
            student_id,
            kind=ItemKind(payload.get("kind", "Document")),
            body=payload["body"],
            media_type=payload.get("media_type", "text/plain"),
            tags=tuple(payload.get("tags", ())),
            parent_id=payload.get("parent_id"),
        )
        return _serialize_item(item)

    @app.delete("/students/{student_id}/context/items/{item_id}")
    def delete_item(student_id: str, item_id: str, actor: str = Depends(caller)):
        deployment.purge_item(actor, student_id, item_id)
        return {"purged": item_id}

    @app.get("/students/{student_id}/context/export")
    def export_items(student_id: str, actor: str = Depends(caller)):
        data = deployment.export_items(actor, student_id)
        return Response(content=data, media_type="application/zip")

    @app.get("/students/{student_id}/readiness")
    def get_readiness(student_id: str, actor: str = Depends(caller)):
        state = deployment.get_readiness(actor, student_id)
        return {
            "student_id": state.student_id,
            "question_maturity": state.question_maturity,
            "design_readiness": state.design_readiness,
            "data_readiness": state.data_readiness,
            "ethics_risk": state.ethics_risk,
            "citation_coverage": state.citation_coverage,
            "as_of": state.as_of,
        }

    @app.patch("/students/{student_id}/readiness")
    def patch_readiness(student_id: str, payload: dict, actor: str = Depends(caller)):
        state = deployment.update_readiness(
            actor, student_id, payload["component"], float(payload["value"])
        )
        return {"component": payload["component"], "value": float(payload["value"]), "as_of": state.as_of}

    # ------------------------------------------------------------------- goals

    @app.get("/students/{student_id}/goals")
    def get_goals(student_id: str, actor: str = Depends(caller)):
        goals = deployment.get_goals(actor, student_id)
        return {
            "goals": [
                {**_serialize_goal(g), "completion": deployment.goal_completion(g.id)}
                for g in goals
            ]
        }

    @app.post("/students/{student_id}/goals")
    def post_goal(student_id: str, payload: dict, actor: str = Depends(caller)):
        goal = deployment.create_goal(
            actor,
            student_id,
            title=payload["title"],
            metric=GoalMetric(payload["metric"]),
            target=float(payload["target"]),
            unit=payload.get("unit", "items"),
            threshold=float(payload["threshold"]),
            release_rule=ReleaseRule(payload.get("release_rule", "ManualOnly")),
            planned_sections=tuple(payload.get("planned_sections", ())),
            evaluator_ref=payload.get("evaluator_ref"),
        )
        return _serialize_goal(goal)

    @app.patch("/students/{student_id}/goals/{goal_id}")
    def patch_goal(student_id: str, goal_id: str, payload: dict, actor: str = Depends(caller)):
        field_name = payload["field"]
        value: Any = payload["value"]
        if field_name in ("threshold", "target"):
            value = float(value)
        if field_name == "release_rule":
            value = ReleaseRule(value)
        goal = deployment.edit_goal(actor, student_id, goal_id, field_name, value)
        return _serialize_goal(goal)

    # ----------------------------------------------------------------- consent

    @app.get("/students/{student_id}/consent")
    def get_consent(student_id: str, actor: str = Depends(caller)):
        return {
            "scopes": {
                scope.value: deployment.get_consent(actor, student_id, scope).state.value
                for scope in ConsentScope
            }
        }

    @app.post("/students/{student_id}/consent")
    def post_consent(student_id: str, payload: dict, actor: str = Depends(caller)):
        record = deployment.set_consent(
            actor,
            student_id,
            ConsentScope(payload["scope"]),
            ConsentState(payload["state"]),
        )
        return {"scope": record.scope.value, "state": record.state.value, "updated_at": record.updated_at}

    # -------------------------------------------------------------- moderation

    @app.post("/artefacts/{artefact_id}/share")
    def share_artefact(artefact_id: str, actor: str = Depends(caller)):
        case = deployment.share_for_moderation(actor, artefact_id)
        return _serialize_case(case)

    @app.get("/supervisors/{supervisor_id}/queue")
    def get_queue(supervisor_id: str, actor: str = Depends(caller)):
        cases = deployment.supervisor_queue(actor, supervisor_id)
        return {"cases": [_serialize_case(c) for c in cases]}

    @app.post("/cases/{case_id}/review")
    def review_case(case_id: str, actor: str = Depends(caller)):
        return _serialize_case(deployment.begin_case_review(actor, case_id))

    @app.post("/cases/{case_id}/return")
    def return_case(case_id: str, payload: dict, actor: str = Depends(caller)):
        patch = None
        if payload.get("patch"):
            raw = payload["patch"]
            patch = PatchSpec(
                directive_kind=DirectiveKind(raw["kind"]),
                payload=tuple(raw["payload"]),
                topic_key=raw.get("topic_key", "*"),
                supersedes=raw.get("supersedes"),
            )
        case, update = deployment.return_case(
            actor, case_id, payload.get("feedback", ""), patch
        )
        return {
            "case": _serialize_case(case),
            "policy_update": {
                "id": update.id,
                "patch_id": update.patch_id,
                "feedback_text": update.feedback_text,
                "artefact_id": update.artefact_id,
            },
        }

    @app.post("/cases/{case_id}/acknowledge")
    def acknowledge_case(case_id: str, actor: str = Depends(caller)):
        return _serialize_case(deployment.acknowledge_return(actor, case_id))

    @app.post("/cases/{case_id}/close")
    def close_case(case_id: str, actor: str = Depends(caller)):
        return _serialize_case(deployment.close_case(actor, case_id))

    # ----------------------------------------------------------------- patches

    @app.get("/students/{student_id}/patches")
    def get_patches(student_id: str, actor: str = Depends(caller)):
        return {"digest": deployment.patch_digest(actor, student_id)}

    # --------------------------------------------------------------- summaries

    @app.get("/students/{student_id}/summaries")
    def get_summaries(student_id: str, actor: str = Depends(caller)):
        return {
            "summaries": [
                _serialize_summary(s) for s in deployment.get_summaries(actor, student_id)
            ]
        }

    @app.post("/students/{student_id}/summaries/{summary_id}/curate")
    def curate(student_id: str, summary_id: str, payload: dict, actor: str = Depends(caller)):
        summary = deployment.curate_progress_summary(
            actor, student_id, summary_id, payload.get("narrative")
        )
        return _serialize_summary(summary)

    @app.post("/students/{student_id}/summaries/{summary_id}/release")
    def release(student_id: str, summary_id: str, actor: str = Depends(caller)):
        summary = deployment.release_progress_summary(actor, student_id, summary_id)
        return _serialize_summary(summary)

    @app.get("/supervisors/{supervisor_id}/summaries")
    def supervisor_summaries(supervisor_id: str, actor: str = Depends(caller)):
        summaries = deployment.supervisor_summaries(actor, supervisor_id)
        return {"summaries": [_serialize_summary(s) for s in summaries]}

    # ---------------------------------------------------------------- practice

    @app.get("/students/{student_id}/practice/due")
    def practice_due(student_id: str, actor: str = Depends(caller)):
        items = deployment.practice_due(actor, student_id)
        return {
            "items": [
                {
                    "id": i.id,
                    "prompt_text": i.prompt_text,
                    "due_at": i.due_at,
                    "interval_index": i.interval_index,
                }
                for i in items
            ]
        }

    @app.post("/students/{student_id}/practice")
    def create_practice(student_id: str, payload: dict, actor: str = Depends(caller)):
        item = deployment.create_practice_item(actor, student_id, payload["prompt_text"])
        return {"id": item.id, "due_at": item.due_at, "interval_index": item.interval_index}

    @app.post("/students/{student_id}/practice/{item_id}/review")
    def review_practice(student_id: str, item_id: str, payload: dict, actor: str = Depends(caller)):
        item = deployment.review_practice_item(
            actor, student_id, item_id, bool(payload["success"])
        )
        return {"id": item.id, "due_at": item.due_at, "interval_index": item.interval_index}

    # --------------------------------------------------------------------- GRS

    @app.get("/grs/aggregates")
    def aggregates(cohort: str | None = Query(default=None), actor: str = Depends(caller)):
        signals = deployment.aggregates(actor, cohort_key=cohort)
        return {
            "signals": [
                {
                    "cohort_key": s.cohort_key,
                    "metric": s.metric,
                    "value": s.value,
                    "group_size": s.group_size,
                }
                for s in signals
            ]
        }

    @app.get("/grs/policy")
    def get_policy(actor: str = Depends(caller)):
        documents = deployment.policy_documents(actor)
        return {
            "documents": [
                {"id": d.id, "title": d.title, "version": d.version, "effective_date": d.effective_date}
                for d in documents
            ]
        }

    @app.post("/grs/policy")
    def post_policy(payload: dict, actor: str = Depends(caller)):
        corpus = Corpus(
            id=payload.get("id", "policy"),
            corpus_class=CorpusClass.policy(),
            documents=tuple(
                Document(
                    id=d["id"],
                    title=d.get("title", d["id"]),
                    body=d["body"],
                    version=str(d.get("version", "1")),
                    effective_date=d.get("effective_date", ""),
                )
                for d in payload["documents"]
            ),
        )
        deployment.ingest_corpus(actor, corpus)
        return {"ingested": corpus.id, "documents": len(corpus.documents)}

    @app.get("/grs/policy/conflicts")
    def policy_conflicts(actor: str = Depends(caller)):
        conflicts, warnings = deployment.policy_conflicts(actor)
        return {
            "conflicts": [
                {
                    "topic_key": c.topic_key,
                    "a": {"document_id": c.clause_a.document_id, "value": c.clause_a.value, "line": c.clause_a.line_no},
                    "b": {"document_id": c.clause_b.document_id, "value": c.clause_b.value, "line": c.clause_b.line_no},
                }
                for c in conflicts
            ],
            "warnings": warnings,
        }

    @app.get("/grs/policy/diff")
    def policy_diff_endpoint(
        v1: int = Query(default=-2), v2: int = Query(default=-1), actor: str = Depends(caller)
    ):
        entries = deployment.policy_changes(actor, v1, v2)
        return {
            "entries": [
                {"kind": e.kind, "topic_key": e.topic_key, "before": e.before, "after": e.after}
                for e in entries
            ]
        }

    @app.get("/policy/search")
    def policy_search(q: str, k: int = Query(default=4), actor: str = Depends(caller)):
        results = deployment.policy_query(actor, q, k=k)
        return {
            "results": [
                {
                    "passage": r.passage_text,
                    "backlink": _serialize_backlink(r.backlink),
                    "score": r.score,
                }
                for r in results
            ]
        }

    # ------------------------------------------------------------------- audit

    @app.get("/audit/verify")
    def audit_verify(actor: str = Depends(caller)):
        status = deployment.verify_audit(actor)
        return {"valid": status.valid, "broken_at": status.broken_at, "status": str(status)}

    @app.get("/audit/events")
    def audit_events(actor: str = Depends(caller)):
        events = deployment.audit_events_for(actor)
        return {
            "events": [
                {
                    "seq": e.seq,
                    "actor_id": e.actor_id,
                    "action": e.action,
                    "resource": e.resource,
                    "payload_digest": e.payload_digest,
                    "timestamp": e.timestamp,
                }
                for e in events
            ]
        }

    return app
