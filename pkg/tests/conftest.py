from __future__ import annotations

import pytest

from phdcopilot.deployment import Deployment
from phdcopilot.governance.actors import Actor, Role
from phdcopilot.retrieval.corpus import Corpus, CorpusClass, Document


class TickClock:
    """Deterministic logical clock: each call advances one unit."""

    def __init__(self, start: float = 0.0):
        self.t = start

    def __call__(self) -> float:
        self.t += 1.0
        return self.t


POLICY_DOCS = (
    Document(
        "pol-leave",
        "Leave policy",
        "Annual leave during candidature requires written notice. "
        "Apply before travel begins. Extensions follow a separate approval path.\n"
        "max-leave-weeks: 4\n",
        version="2",
        effective_date="2025-01-01",
    ),
    Document(
        "pol-review",
        "Annual review policy",
        "The annual review deadline falls in October. "
        "Ethics approval must precede data collection. "
        "Submissions after the deadline need an extension request.\n"
        "review-cycle-months: 12\n",
        version="1",
        effective_date="2025-01-01",
    ),
)

STUDENT_DOCS = (
    Document(
        "srcA",
        "Method notes",
        "Bayesian methods fit the study design. The prior choice matters here. "
        "Sensitivity checks are planned for robustness. "
        "ANOVA comparisons complement the main model.",
    ),
    Document(
        "srcX",
        "Workshop blog",
        "Bayesian methods are effortless. No sensitivity checks are needed. "
        "Trust the posterior and move on quickly.",
    ),
)


@pytest.fixture()
def clock() -> TickClock:
    return TickClock()


@pytest.fixture()
def deployment(clock: TickClock) -> Deployment:
    d = Deployment(clock=clock)
    d.register_actor(Actor(id="alice", role=Role.STUDENT))
    d.register_actor(Actor(id="bob", role=Role.STUDENT))
    d.register_actor(Actor(id="sup1", role=Role.SUPERVISOR, supervisees=frozenset({"alice"})))
    d.register_actor(Actor(id="sup2", role=Role.SUPERVISOR, supervisees=frozenset({"bob"})))
    d.register_actor(Actor(id="grs1", role=Role.GRS))
    return d


@pytest.fixture()
def grounded(deployment: Deployment) -> Deployment:
    deployment.ingest_corpus(
        "grs1",
        Corpus(id="policy", corpus_class=CorpusClass.policy(), documents=POLICY_DOCS),
    )
    deployment.ingest_corpus(
        "alice",
        Corpus(
            id="student:alice:thesis",
            corpus_class=CorpusClass.student("alice"),
            documents=STUDENT_DOCS,
        ),
    )
    return deployment
