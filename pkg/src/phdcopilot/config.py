"""Deployment configuration, loadable from a single JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_SIGNPOSTING = (
    "Institutional counselling service (confidential, free for candidates)",
    "Graduate Research School student support office",
    "24/7 crisis line: contact your local emergency service",
)


@dataclass(frozen=True)
class BackendConfig:
    mode: str = "mock"  # "mock" | "http"
    endpoint: str | None = None
    script: tuple[tuple[str, tuple[str, ...]], ...] = ()  # (pattern, replies)


@dataclass(frozen=True)
class ActorConfig:
    id: str
    role: str
    supervisees: tuple[str, ...] = ()
    cohort: str | None = None
    token: str | None = None


@dataclass(frozen=True)
class CorpusConfig:
    corpus_class: str  # "policy" | "student:<id>"
    directory: str


@dataclass(frozen=True)
class DeploymentConfig:
    digest_algorithm: str = "sha256"
    audit_log_path: str | None = None
    k_min: int = 5
    summary_budget: int = 2000
    practice_base_interval: float = 1.0
    retrieval_k: int = 4
    default_seed: int = 0
    signposting_resources: tuple[str, ...] = DEFAULT_SIGNPOSTING
    backend: BackendConfig = field(default_factory=BackendConfig)
    actors: tuple[ActorConfig, ...] = ()
    corpora: tuple[CorpusConfig, ...] = ()
    host: str = "127.0.0.1"
    port: int = 8044
    console_dist: str | None = None

    @staticmethod
    def from_file(path: str | Path) -> "DeploymentConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        backend_raw = raw.get("backend", {})
        return DeploymentConfig(
            digest_algorithm=raw.get("digest_algorithm", "sha256"),
            audit_log_path=raw.get("audit_log_path"),
            k_min=int(raw.get("k_min", 5)),
            summary_budget=int(raw.get("summary_budget", 2000)),
            practice_base_interval=float(raw.get("practice_base_interval", 1.0)),
            retrieval_k=int(raw.get("retrieval_k", 4)),
            default_seed=int(raw.get("default_seed", 0)),
            signposting_resources=tuple(raw.get("signposting_resources", DEFAULT_SIGNPOSTING)),
            backend=BackendConfig(
                mode=backend_raw.get("mode", "mock"),
                endpoint=backend_raw.get("endpoint"),
                script=tuple(
                    (entry["pattern"], tuple(entry["replies"]))
                    for entry in backend_raw.get("script", ())
                ),
            ),
            actors=tuple(
                ActorConfig(
                    id=a["id"],
                    role=a["role"],
                    supervisees=tuple(a.get("supervisees", ())),
                    cohort=a.get("cohort"),
                    token=a.get("token"),
                )
                for a in raw.get("actors", ())
            ),
            corpora=tuple(
                CorpusConfig(corpus_class=c["class"], directory=c["dir"])
                for c in raw.get("corpora", ())
            ),
            host=raw.get("host", "127.0.0.1"),
            port=int(raw.get("port", 8044)),
            console_dist=raw.get("console_dist"),
        )
