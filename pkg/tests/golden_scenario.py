"""The scripted moderation-and-patch scenario behind the golden transcript.

Everything here is pinned: logical clock, fixed seeds, fixed corpora, the
scripted mock backend. Any behavioural drift in routing, retrieval, patching,
or generation shows up as a byte difference against the checked-in fixture.
"""

from __future__ import annotations

from phdcopilot.deployment import Deployment, PatchSpec, SessionTranscript
from phdcopilot.directives import DirectiveKind
from phdcopilot.governance.actors import Actor, Role
from phdcopilot.retrieval.corpus import Corpus, CorpusClass, Document

GOLDEN_SESSION = "golden-patch-session"
GOLDEN_QUERY = "explain my Bayesian method choices"
GOLDEN_SEED = 3
EXCLUDED_SOURCE = "srcX"


class _Tick:
    def __init__(self) -> None:
        self.t = 0.0

    def __call__(self) -> float:
        self.t += 1.0
        return self.t


def _corpora() -> tuple[Corpus, Corpus]:
    policy = Corpus(
        id="policy",
        corpus_class=CorpusClass.policy(),
        documents=(
            Document(
                "pol-leave",
                "Leave policy",
                "Annual leave during candidature requires written notice.\n"
                "max-leave-weeks: 4\n",
                version="2",
            ),
        ),
    )
    thesis = Corpus(
        id="student:alice:thesis",
        corpus_class=CorpusClass.student("alice"),
        documents=(
            Document(
                "srcA",
                "Method notes",
                "Bayesian methods fit the study design. The prior choice matters here. "
                "Sensitivity checks are planned for robustness.",
            ),
            Document(
                EXCLUDED_SOURCE,
                "Workshop blog",
                "Bayesian methods are effortless. No sensitivity checks are needed. "
                "Trust the posterior and move on quickly.",
            ),
        ),
    )
    return policy, thesis


def run_golden_scenario() -> tuple[Deployment, SessionTranscript, dict]:
    deployment = Deployment(clock=_Tick())
    deployment.register_actor(Actor(id="alice", role=Role.STUDENT))
    deployment.register_actor(
        Actor(id="sup1", role=Role.SUPERVISOR, supervisees=frozenset({"alice"}))
    )
    deployment.register_actor(Actor(id="grs1", role=Role.GRS))
    policy, thesis = _corpora()
    deployment.ingest_corpus("grs1", policy)
    deployment.ingest_corpus("alice", thesis)

    first = deployment.query(
        "alice", "alice", GOLDEN_QUERY, seed=GOLDEN_SEED, session_id=GOLDEN_SESSION
    )
    case = deployment.share_for_moderation("alice", first.artefact_id)
    deployment.begin_case_review("sup1", case.id)
    case, update = deployment.return_case(
        "sup1",
        case.id,
        "Drop the workshop blog; it skips the sensitivity story.",
        PatchSpec(directive_kind=DirectiveKind.EXCLUDE, payload=(EXCLUDED_SOURCE,)),
    )
    second = deployment.query(
        "alice", "alice", GOLDEN_QUERY, seed=GOLDEN_SEED, session_id=GOLDEN_SESSION
    )

    transcript = deployment.transcript(GOLDEN_SESSION)
    assert transcript is not None
    return deployment, transcript, {"first": first, "second": second, "case": case, "update": update}
