"""Session transcript persistence for replay."""

from __future__ import annotations

import json
from pathlib import Path

from .deployment import SessionTranscript, TranscriptEvent


def save_transcript(transcript: SessionTranscript, path: str | Path) -> None:
    payload = {
        "session_id": transcript.session_id,
        "student_id": transcript.student_id,
        "seed": transcript.seed,
        "events": [
            {
                "query": e.query,
                "seed": e.seed,
                "as_of": e.as_of,
                "route_kind": e.route_kind,
                "plan_digest": e.plan_digest,
                "response_text": e.response_text,
                "backlink_refs": list(e.backlink_refs),
                "trace_steps": list(e.trace_steps),
            }
            for e in transcript.events
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")


def load_transcript(path: str | Path) -> SessionTranscript:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return SessionTranscript(
        session_id=raw["session_id"],
        student_id=raw["student_id"],
        seed=int(raw["seed"]),
        events=[
            TranscriptEvent(
                query=e["query"],
                seed=int(e["seed"]),
                as_of=float(e["as_of"]),
                route_kind=e["route_kind"],
                plan_digest=e["plan_digest"],
                response_text=e["response_text"],
                backlink_refs=tuple(e["backlink_refs"]),
                trace_steps=tuple(e["trace_steps"]),
            )
            for e in raw["events"]
        ],
    )
