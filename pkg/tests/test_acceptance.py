"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is pinned here; nothing defers to later calibration.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import random
import time
from pathlib import Path

import pytest

from phdcopilot.deployment import Deployment, PatchSpec
from phdcopilot.directives import CompiledDirectives, DirectiveKind
from phdcopilot.governance.actors import Actor, Role
from phdcopilot.governance.audit import AuditLog, verify_chain
from phdcopilot.governance.consent import ConsentScope, ConsentState
from phdcopilot.context.items import ItemKind
from phdcopilot.orchestrator import (
    BloomLevel,
    GenerationBudget,
    MockBackend,
    Route,
    RouteKind,
    ScriptRule,
    StepKind,
    agreement_needed,
    build_plan,
    classify_route,
    execute_plan,
    self_consistency,
)
from phdcopilot.retrieval import Corpus, CorpusClass, Document, index_corpus
from phdcopilot.supervision.goals import GoalMetric, ReleaseRule
from phdcopilot.tkg import TemporalFact, TemporalGraph
from phdcopilot.transcripts import save_transcript
from phdcopilot.triage import load_shipped_catalog, severity

from .golden_scenario import EXCLUDED_SOURCE, GOLDEN_SESSION, run_golden_scenario
from .oracles import bm25_rank, modal_vote, snapshot, snapshot_diff
from .test_audit import MUTABLE_FIELDS, build_log, mutate_event

FIXTURES = Path(__file__).parent / "fixtures"


class Tick:
    def __init__(self) -> None:
        self.t = 0.0

    def __call__(self) -> float:
        self.t += 1.0
        return self.t


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# Frozen expected severity column, in catalog row order.
EXPECTED_SEVERITIES = [3, 3, 3, 2, 2, 3, 3, 2, 2, 2, 3, 3, 2, 2, 1]


def test_triage_reproduction():
    started = time.monotonic()
    records = load_shipped_catalog()
    recomputed = [severity(r.prevalence_band, r.consequence_band) for r in records]
    elapsed = time.monotonic() - started
    matches = sum(1 for got, want in zip(recomputed, EXPECTED_SEVERITIES) if got == want)
    has_half_up_case = any(
        (r.prevalence_band, r.consequence_band) in ((2, 3), (3, 2)) and s == 3
        for r, s in zip(records, recomputed)
    )
    ok = (
        len(records) == 15
        and matches == 15
        and recomputed == [r.severity for r in records]
        and has_half_up_case
        and elapsed < 1.0
    )
    _report(
        "triage-reproduction",
        ok,
        f"{matches}/15 severities match the frozen expected column "
        f"(round(2.5)=3 case included) in {elapsed * 1000:.0f} ms",
    )


def test_severity_enumeration():
    expected = {
        (1, 1): 1, (1, 2): 2, (2, 1): 2, (1, 3): 2, (3, 1): 2,
        (2, 2): 2, (2, 3): 3, (3, 2): 3, (3, 3): 3,
    }
    got = {(p, c): severity(p, c) for p, c in itertools.product((1, 2, 3), repeat=2)}
    _report(
        "severity-enumeration",
        got == expected,
        f"all 9 (P,C) pairs exact: {sorted(got.items())}",
    )


def test_audit_tamper_detection():
    log = build_log(100)
    pristine = list(log.events)
    rng = random.Random(0xA0D17)
    started = time.monotonic()
    trials = 1000
    detected = 0
    for _ in range(trials):
        index = rng.randrange(100)
        field = rng.choice(MUTABLE_FIELDS)
        mutated = list(pristine)
        mutated[index] = mutate_event(mutated[index], field, rng)
        status = verify_chain(mutated)
        if not status.valid and status.broken_at is not None and status.broken_at <= index:
            detected += 1
    elapsed = time.monotonic() - started
    _report(
        "audit-tamper-detection",
        detected == trials and elapsed < 5.0,
        f"{detected}/{trials} single-field mutations flagged at or before the "
        f"mutated index in {elapsed:.2f} s",
    )


def test_corpus_isolation():
    rng = random.Random(0x150)
    vocab = "ethics review data thesis policy leave methods deadline analysis".split()
    cases = 0
    violations = 0
    for round_no in range(25):
        deployment = Deployment(clock=Tick())
        deployment.register_actor(Actor(id="stu", role=Role.STUDENT))
        deployment.register_actor(Actor(id="grs", role=Role.GRS))
        policy_bodies = {}
        policy_docs = []
        for i in range(rng.randint(1, 3)):
            body = " ".join(rng.choices(vocab, k=20)).capitalize() + "."
            policy_docs.append(Document(f"pol{i}", f"pol{i}", body))
            policy_bodies[f"pol{i}"] = body
        secrets = [f"studentsecret{round_no}x{i}" for i in range(2)]
        student_docs = tuple(
            Document(
                f"stu{i}",
                f"stu{i}",
                " ".join(rng.choices(vocab, k=12)) + f" {secret}.",
            )
            for i, secret in enumerate(secrets)
        )
        deployment.ingest_corpus(
            "grs", Corpus(id="policy", corpus_class=CorpusClass.policy(), documents=tuple(policy_docs))
        )
        deployment.ingest_corpus(
            "stu",
            Corpus(id="student:stu:c", corpus_class=CorpusClass.student("stu"), documents=student_docs),
        )
        policy_ids = set(policy_bodies)
        for _ in range(30):
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 3)))
            for result in deployment.policy_query("grs", query, k=5):
                cases += 1
                if result.backlink.document_id not in policy_ids:
                    violations += 1
        for secret in secrets:
            cases += 1
            if deployment.policy_query("grs", secret, k=5):
                violations += 1
        for _ in range(8):
            cases += 1
            try:
                deployment.get_items("grs", "stu")
                violations += 1
            except Exception:
                pass
    _report(
        "corpus-isolation",
        cases >= 1000 and violations == 0,
        f"{cases} randomized policy-query/GRS-read cases, {violations} violations",
    )


def test_tkg_oracle_equivalence():
    rng = random.Random(0x7C6)
    graph = TemporalGraph()
    for i in range(1000):
        asserted = rng.uniform(0, 1000)
        fid = graph.assert_fact(
            TemporalFact(f"s{rng.randrange(30)}", f"r{rng.randrange(12)}", f"o{i}", asserted)
        )
        if rng.random() < 0.45:
            graph.retract_fact(fid, asserted + rng.uniform(0.001, 400))
    checks = 0
    for _ in range(100):
        t1, t2 = sorted((rng.uniform(-50, 1500), rng.uniform(-50, 1500)))
        assert graph.snapshot_at(t1) == snapshot(graph.facts, t1)
        assert graph.snapshot_at(t2) == snapshot(graph.facts, t2)
        appeared, disappeared = snapshot_diff(graph.facts, t1, t2)
        diff = graph.diff(t1, t2)
        assert diff.appeared == appeared and diff.disappeared == disappeared
        checks += 1
    _report(
        "tkg-oracle-equivalence",
        checks == 100,
        f"1000-fact store: snapshot and diff equal brute-force scans on {checks} random (t1,t2) pairs",
    )


def test_bm25_oracle():
    rng = random.Random(0xB25)
    vocab = (
        "ethics approval review thesis data methods analysis committee deadline "
        "candidature submission draft chapter results model survey pilot consent"
    ).split()
    corpora_checked = 0
    queries_checked = 0
    for _ in range(50):
        n_docs = rng.randint(1, 20)
        docs = []
        for i in range(n_docs):
            sentences = [
                " ".join(rng.choices(vocab, k=rng.randint(3, 10))).capitalize() + "."
                for _ in range(rng.randint(1, 6))
            ]
            docs.append(Document(f"d{i:02d}", f"d{i}", " ".join(sentences)))
        if n_docs >= 2 and rng.random() < 0.5:
            docs[1] = Document("d01", "dup", docs[0].body)  # force exact score ties
        corpus = Corpus(id="c", corpus_class=CorpusClass.student("s"), documents=tuple(docs))
        index = index_corpus(corpus)
        for _ in range(5):
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 4)))
            k = rng.randint(1, 10)
            got = [(r.backlink.document_id, r.backlink.start) for r in index.query(query, k=k)]
            want = [(d, s) for d, s, _ in bm25_rank(corpus, query, k)]
            assert got == want, (query, got, want)
            queries_checked += 1
        corpora_checked += 1
    _report(
        "bm25-oracle",
        corpora_checked == 50,
        f"{queries_checked} queries over {corpora_checked} random corpora (<=20 docs) match "
        "the brute-force ranking exactly, ties included",
    )


def _simulate_escalation(labels: list[str], samples: int, max_escalations: int):
    """Independent model of the documented escalation policy."""
    target = samples
    depth_extended = False
    escalations = 0
    calls = 0
    regenerations = 0
    votes = 0
    while True:
        if regenerations != calls:  # regenerate all samples after a depth switch
            pass
        window = labels[:target]
        counts: dict[str, int] = {}
        for label in window:
            counts[label] = counts.get(label, 0) + 1
        modal = max(counts.values())
        votes += 1
        needed = math.ceil(2 * target / 3)
        if modal >= needed:
            return target, escalations, False, votes
        if escalations >= max_escalations:
            return target, escalations, True, votes
        escalations += 1
        if escalations == 2 and not depth_extended:
            depth_extended = True
        else:
            target += 2


def test_voting_and_escalation():
    # Voting: every sequence of size <= 7 against the brute-force modal oracle.
    sequences = 0
    for size in range(1, 8):
        alphabet = "ABCD"[: min(size, 4)]
        for combo in itertools.product(alphabet, repeat=size):
            responses = list(combo)
            vote = self_consistency(responses)
            index, count, ratio = modal_vote(responses)
            assert vote.winner_index == index and vote.modal_count == count
            assert vote.agreement_ratio == pytest.approx(ratio)
            sequences += 1

    # Escalation: scripted scenarios match an independent policy simulator.
    rng = random.Random(0xE5C)
    scenarios = 0
    for _ in range(200):
        labels = [rng.choice("ABC") for _ in range(16)]
        samples = 3
        max_escalations = rng.randint(0, 3)
        plan = build_plan(
            "acceptance probe",
            Route(
                kind=RouteKind.DISCIPLINE,
                bloom_level=BloomLevel.ANALYSE,
                corpora=(),
                constraints=(),
                budget=GenerationBudget(samples=samples, max_escalations=max_escalations),
            ),
            CompiledDirectives(active=(), shadowed=()),
            lambda cid: (),
        )
        backend = MockBackend((ScriptRule(pattern=r"acceptance probe", replies=tuple(labels)),))
        response = execute_plan(plan, seed=0, backend=backend, indexes={})
        target, escalations, contested, votes = _simulate_escalation(labels, samples, max_escalations)
        window = labels[:target]
        expected_winner = self_consistency(window).winner_text
        assert response.text == expected_winner
        assert response.contested == contested
        assert len(response.trace.votes) == votes
        assert len(response.trace.escalations) == escalations
        # Escalation happens exactly while agreement < 2/3 and budget remains.
        for vote_trace in response.trace.votes[:-1]:
            assert vote_trace.modal_count < agreement_needed(vote_trace.samples)
        scenarios += 1
    _report(
        "voting-escalation",
        True,
        f"{sequences} vote sequences (size<=7) match brute-force modal count; "
        f"{scenarios} scripted escalation scenarios match the independent policy simulator",
    )


def _trajectory_deployment(threshold: float):
    deployment = Deployment(clock=Tick())
    deployment.register_actor(Actor(id="stu", role=Role.STUDENT))
    cell = {"value": 0.0}
    deployment.evaluators["cell"] = lambda goal, evidence: cell["value"]
    deployment.create_goal(
        "stu", "stu", "trajectory", GoalMetric.CUSTOM, 1, "unit", threshold,
        evaluator_ref="cell",
    )
    anchor = deployment.put_item("stu", "stu", ItemKind.DOCUMENT, "anchor")
    return deployment, cell, anchor.id


def test_threshold_semantics():
    rng = random.Random(0x7E5)
    trajectories = 0
    for _ in range(1000):
        threshold = rng.uniform(0.05, 1.0)
        deployment, cell, anchor_id = _trajectory_deployment(threshold)
        completion = cell["value"]
        expected_crossings = 0
        for step in range(rng.randint(1, 12)):
            new = rng.random()
            if completion < threshold <= new:
                expected_crossings += 1
            cell["value"] = new
            deployment.tag_item("stu", "stu", anchor_id, (f"s{step}",))
            completion = new
        prepared = len(deployment._progress_summaries)
        assert prepared == expected_crossings, (threshold,)
        trajectories += 1

    # Adversarial consent toggling: a release only ever lands with consent On.
    toggle_rng = random.Random(0x70661E)
    release_attempts = 0
    violations = 0
    for _ in range(300):
        deployment = Deployment(clock=Tick())
        deployment.register_actor(Actor(id="stu", role=Role.STUDENT))
        deployment.register_actor(
            Actor(id="sup", role=Role.SUPERVISOR, supervisees=frozenset({"stu"}))
        )
        cell = {"value": 0.0}
        deployment.evaluators["cell"] = lambda goal, evidence: cell["value"]
        auto = toggle_rng.random() < 0.5
        deployment.create_goal(
            "stu", "stu", "g", GoalMetric.CUSTOM, 1, "unit", 0.5,
            release_rule=ReleaseRule.AUTO_SEND_ON_CROSS if auto else ReleaseRule.MANUAL_ONLY,
            evaluator_ref="cell",
        )
        anchor = deployment.put_item("stu", "stu", ItemKind.DOCUMENT, "anchor")
        consent_on = False
        for step in range(toggle_rng.randint(4, 14)):
            action = toggle_rng.choice(("toggle", "cross", "curate", "release"))
            released_before = {
                s.id for s in deployment._progress_summaries.values() if s.released
            }
            if action == "toggle":
                consent_on = not consent_on
                deployment.set_consent(
                    "stu", "stu", ConsentScope.AUTO_SEND_SUMMARY,
                    ConsentState.ON if consent_on else ConsentState.OFF,
                )
            elif action == "cross":
                cell["value"] = 0.0
                deployment.tag_item("stu", "stu", anchor.id, (f"d{step}",))
                cell["value"] = 1.0
                deployment.tag_item("stu", "stu", anchor.id, (f"u{step}",))
            elif action == "curate":
                for summary in deployment.get_summaries("stu", "stu"):
                    if summary.curated_by is None:
                        deployment.curate_progress_summary("stu", "stu", summary.id)
                        break
            elif action == "release":
                for summary in deployment.get_summaries("stu", "stu"):
                    if summary.curated_by is not None and not summary.released:
                        release_attempts += 1
                        try:
                            deployment.release_progress_summary("stu", "stu", summary.id)
                            if not consent_on:
                                violations += 1
                        except Exception:
                            if consent_on:
                                violations += 1
                        break
            released_after = {
                s.id for s in deployment._progress_summaries.values() if s.released
            }
            if released_after - released_before and not consent_on:
                violations += 1
    _report(
        "threshold-semantics",
        trajectories == 1000 and violations == 0,
        f"{trajectories} random trajectories: preparations == upward crossings; "
        f"{release_attempts} adversarial release attempts across 300 toggle scenarios, "
        f"{violations} consent violations",
    )


def test_patch_persistence_golden_transcript(tmp_path):
    started = time.monotonic()
    deployment, transcript, extra = run_golden_scenario()
    first, second = extra["first"], extra["second"]
    assert len(first.response.backlinks) >= 1
    assert EXCLUDED_SOURCE in {b.document_id for b in first.response.backlinks}
    assert second.response.backlinks
    assert EXCLUDED_SOURCE not in {b.document_id for b in second.response.backlinks}
    compiled = deployment.compiled_directives("alice", "Discipline")
    assert any(
        d.kind is DirectiveKind.EXCLUDE and EXCLUDED_SOURCE in d.payload for d in compiled.active
    )
    replayed = tmp_path / "golden.json"
    save_transcript(transcript, replayed)
    golden = (FIXTURES / "golden_patch_transcript.json").read_bytes()
    identical = replayed.read_bytes() == golden
    elapsed = time.monotonic() - started
    _report(
        "patch-persistence-golden-transcript",
        identical and elapsed < 10.0,
        f"end-to-end moderation run byte-identical to the checked-in transcript "
        f"({len(transcript.events)} events) in {elapsed:.2f} s",
    )


WELLBEING_SEEDS = (
    "overwhelmed", "can't sleep", "anxious about everything", "feeling hopeless",
    "burnt out", "panic before meetings", "so lonely in the lab", "mental health dip",
    "struggling to cope", "exhausted and stressed",
)
FILLER = "the review my data chapter draft supervisor experiment model lately".split()


def test_wellbeing_guardrail():
    rng = random.Random(0x3E11)
    deployment = Deployment(clock=Tick())
    deployment.register_actor(Actor(id="stu", role=Role.STUDENT))
    prompts = 0
    violations = 0
    for i in range(500):
        marker = rng.choice(WELLBEING_SEEDS)
        words = rng.choices(FILLER, k=rng.randint(0, 6))
        insert_at = rng.randint(0, len(words))
        words.insert(insert_at, marker)
        prompt = "I am " + " ".join(words)
        route = classify_route(prompt)
        if route.kind is not RouteKind.WELLBEING:
            violations += 1
            continue
        plan = build_plan(
            prompt, route, CompiledDirectives(active=(), shadowed=()), lambda cid: (),
            screening_consented=bool(i % 2),
        )
        if plan.tool_steps():
            violations += 1
        outcome = deployment.query("stu", "stu", prompt, seed=i)
        steps = set(outcome.response.trace.steps)
        if steps & {StepKind.RETRIEVE.value, StepKind.GENERATE.value}:
            violations += 1
        if "Support options" not in outcome.response.text:
            violations += 1
        prompts += 1
    _report(
        "wellbeing-guardrail",
        prompts == 500 and violations == 0,
        f"{prompts} fuzzed wellbeing prompts: no tool or open-generation steps, "
        f"signposting always present, {violations} violations",
    )
