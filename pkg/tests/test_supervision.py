from __future__ import annotations

import itertools
import random

import pytest

from phdcopilot.context.items import ItemKind
from phdcopilot.deployment import AuthorizationDenied, Deployment, PatchSpec
from phdcopilot.directives import DirectiveKind
from phdcopilot.governance.consent import ConsentScope, ConsentState
from phdcopilot.supervision import (
    AggregateSignal,
    CaseState,
    IllegalTransitionError,
    LEGAL_TRANSITIONS,
    ModerationCase,
    StudentProgress,
    TaskGoal,
    GoalMetric,
    ReleaseRule,
    crossed_upward,
    emit_aggregates,
    evaluate_goal,
)


def fresh_case() -> ModerationCase:
    return ModerationCase(id="c1", artefact_id="a1", student_id="alice", supervisor_id="sup1")


def test_only_the_linear_path_is_reachable():
    states = list(CaseState)
    for current, requested in itertools.product(states, states):
        case = fresh_case()
        object.__setattr__(case, "state", current)
        legal = (current, requested) in LEGAL_TRANSITIONS
        if legal:
            case.transition(requested, at=1.0)
        else:
            with pytest.raises(IllegalTransitionError):
                case.transition(requested, at=1.0)


def test_every_reachable_history_is_a_prefix_of_the_legal_path():
    # Exhaustive small-trace enumeration over all action sequences.
    actions = ["share", "review", "return", "ack", "close"]
    full = [
        CaseState.DRAFT,
        CaseState.SHARED,
        CaseState.UNDER_REVIEW,
        CaseState.RETURNED,
        CaseState.APPLIED,
        CaseState.CLOSED,
    ]
    apply = {
        "share": lambda c: c.transition(CaseState.SHARED, 1.0),
        "review": lambda c: c.transition(CaseState.UNDER_REVIEW, 2.0),
        "return": lambda c: c.transition(CaseState.RETURNED, 3.0, feedback="fb"),
        "ack": lambda c: c.transition(CaseState.APPLIED, 4.0),
        "close": lambda c: c.transition(CaseState.CLOSED, 5.0),
    }
    for length in range(0, 6):
        for sequence in itertools.product(actions, repeat=length):
            case = fresh_case()
            for action in sequence:
                try:
                    case = apply[action](case)
                except IllegalTransitionError:
                    pass
            assert list(case.history) == full[: len(case.history)]


def test_draft_to_closed_shortcut_is_illegal():
    case = fresh_case().transition(CaseState.SHARED, 1.0)
    with pytest.raises(IllegalTransitionError):
        case.transition(CaseState.CLOSED, 2.0)


def test_share_puts_case_in_supervisor_queue(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft section")
    case = deployment.share_for_moderation("alice", item.id)
    assert case.state is CaseState.SHARED
    queue = deployment.supervisor_queue("sup1", "sup1")
    assert [c.id for c in queue] == [case.id]


def test_sharing_someone_elses_artefact_denies(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft")
    with pytest.raises((AuthorizationDenied, Exception)) as err:
        deployment.share_for_moderation("bob", item.id)
    assert err.type is not None


def test_re_share_while_open_is_rejected(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft")
    deployment.share_for_moderation("alice", item.id)
    with pytest.raises(ValueError):
        deployment.share_for_moderation("alice", item.id)


def test_return_requires_feedback(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft")
    case = deployment.share_for_moderation("alice", item.id)
    deployment.begin_case_review("sup1", case.id)
    with pytest.raises(ValueError):
        deployment.return_case("sup1", case.id, "   ")


def test_feedback_only_return_has_no_patch(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft")
    case = deployment.share_for_moderation("alice", item.id)
    deployment.begin_case_review("sup1", case.id)
    case, update = deployment.return_case("sup1", case.id, "tighten the argument")
    assert case.state is CaseState.RETURNED
    assert update.patch_id is None
    assert case.patch_id is None


def test_non_owning_supervisor_cannot_return(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft")
    case = deployment.share_for_moderation("alice", item.id)
    deployment.begin_case_review("sup1", case.id)
    with pytest.raises(AuthorizationDenied):
        deployment.return_case("sup2", case.id, "not my student")


def test_acknowledge_then_close_completes_the_loop(deployment: Deployment):
    item = deployment.put_item("alice", "alice", ItemKind.ARTEFACT, "draft")
    case = deployment.share_for_moderation("alice", item.id)
    deployment.begin_case_review("sup1", case.id)
    deployment.return_case("sup1", case.id, "good, apply the fix")
    case = deployment.acknowledge_return("alice", case.id)
    assert case.state is CaseState.APPLIED
    case = deployment.close_case("alice", case.id)
    assert case.state is CaseState.CLOSED


def goal(threshold: float = 0.8, metric=GoalMetric.LITERATURE_REVIEWED_COUNT, **kw) -> TaskGoal:
    return TaskGoal(
        id="g1",
        student_id="alice",
        title="review literature",
        metric=metric,
        target=kw.pop("target", 40.0),
        unit="papers",
        threshold=threshold,
        **kw,
    )


def test_draft_completeness_is_section_ratio(deployment: Deployment):
    g = deployment.create_goal(
        "alice", "alice", "draft", GoalMetric.DRAFT_COMPLETENESS, 5, "sections", 0.9,
        planned_sections=("intro", "methods", "results", "discussion", "conclusion"),
    )
    for section in ("intro", "methods", "results", "discussion"):
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, f"{section} text", tags=(f"section:{section}",))
    assert deployment.goal_completion(g.id) == pytest.approx(0.8)


def test_count_metric_is_tagged_items_over_target(deployment: Deployment):
    g = deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 40, "papers", 0.8
    )
    for i in range(12):
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, f"paper {i}", tags=("reviewed",))
    assert deployment.goal_completion(g.id) == pytest.approx(0.3)


def test_completion_clamps_at_one(deployment: Deployment):
    g = deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 40, "papers", 0.8
    )
    for i in range(45):
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, f"paper {i}", tags=("reviewed",))
    assert deployment.goal_completion(g.id) == 1.0


def test_zero_target_is_a_configuration_error():
    g = goal(target=0.0)
    with pytest.raises(Exception):
        evaluate_goal(g, ())


def test_threshold_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        goal(threshold=0.0)
    with pytest.raises(ValueError):
        goal(threshold=1.2)


def test_upward_crossing_fires_once_at_the_boundary():
    g = goal(threshold=0.8)
    assert crossed_upward(g, 0.79, 0.80)
    assert not crossed_upward(g, 0.80, 0.81)
    assert not crossed_upward(g, 0.85, 0.79)  # downward never fires
    assert not crossed_upward(g, 0.79, 0.79)


def test_crossing_prepares_a_summary_for_curation(deployment: Deployment):
    deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 10, "papers", 0.5
    )
    for i in range(5):
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, f"p{i}", tags=("reviewed",))
    summaries = deployment.get_summaries("alice", "alice")
    assert len(summaries) == 1
    assert summaries[0].released_at is None
    assert summaries[0].curated_by is None


def test_auto_send_without_consent_prepares_but_never_releases(deployment: Deployment):
    deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 10, "papers", 0.5,
        release_rule=ReleaseRule.AUTO_SEND_ON_CROSS,
    )
    for i in range(5):
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, f"p{i}", tags=("reviewed",))
    summary = deployment.get_summaries("alice", "alice")[0]
    summary = deployment.curate_progress_summary("alice", "alice", summary.id)
    assert summary.released_at is None  # consent is Off by default


def test_consent_revoked_between_crossing_and_release_blocks(deployment: Deployment):
    deployment.set_consent("alice", "alice", ConsentScope.AUTO_SEND_SUMMARY, ConsentState.ON)
    deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 10, "papers", 0.5
    )
    for i in range(5):
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, f"p{i}", tags=("reviewed",))
    summary_id = deployment.get_summaries("alice", "alice")[0].id
    deployment.curate_progress_summary("alice", "alice", summary_id)
    deployment.set_consent("alice", "alice", ConsentScope.AUTO_SEND_SUMMARY, ConsentState.OFF)
    with pytest.raises(AuthorizationDenied) as err:
        deployment.release_progress_summary("alice", "alice", summary_id)
    assert "consent" in err.value.rule


def test_released_summary_carries_links_not_bodies(deployment: Deployment):
    deployment.set_consent("alice", "alice", ConsentScope.AUTO_SEND_SUMMARY, ConsentState.ON)
    deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 4, "papers", 0.5
    )
    bodies = [f"unique-body-text-{i}" for i in range(2)]
    for body in bodies:
        deployment.put_item("alice", "alice", ItemKind.DOCUMENT, body, tags=("reviewed",))
    summary_id = deployment.get_summaries("alice", "alice")[0].id
    deployment.curate_progress_summary("alice", "alice", summary_id)
    released = deployment.release_progress_summary("alice", "alice", summary_id)
    assert released.released_to == "sup1"
    assert released.artefact_links
    for body in bodies:
        assert body not in released.narrative


def test_supervisors_see_only_their_own_students_summaries(deployment: Deployment):
    deployment.set_consent("alice", "alice", ConsentScope.AUTO_SEND_SUMMARY, ConsentState.ON)
    deployment.create_goal(
        "alice", "alice", "lit", GoalMetric.LITERATURE_REVIEWED_COUNT, 2, "papers", 0.5
    )
    deployment.put_item("alice", "alice", ItemKind.DOCUMENT, "p", tags=("reviewed",))
    summary_id = deployment.get_summaries("alice", "alice")[0].id
    deployment.curate_progress_summary("alice", "alice", summary_id)
    deployment.release_progress_summary("alice", "alice", summary_id)
    assert len(deployment.supervisor_summaries("sup1", "sup1")) == 1
    assert deployment.supervisor_summaries("sup2", "sup2") == ()


def test_preparations_equal_upward_crossings_on_random_trajectories():
    rng = random.Random(505)
    for _ in range(400):
        threshold = rng.uniform(0.05, 1.0)
        g = goal(threshold=threshold)
        completion = 0.0
        preparations = 0
        expected = 0
        for _ in range(rng.randint(1, 30)):
            new = rng.random()
            if crossed_upward(g, completion, new):
                preparations += 1
            if completion < threshold <= new:
                expected += 1
            completion = new
        assert preparations == expected


def progress(student: str, done: bool) -> StudentProgress:
    return StudentProgress(
        student_id=student,
        completions=(1.0 if done else 0.2,),
        thresholds=(0.8,),
    )


def test_small_groups_are_suppressed_entirely():
    members = [progress(f"s{i}", True) for i in range(3)]
    assert emit_aggregates("cohort-a", members, k_min=5) == []


def test_signals_cover_exactly_the_consenting_group():
    members = [progress(f"s{i}", i % 2 == 0) for i in range(7)]
    signals = emit_aggregates("cohort-a", members, k_min=5)
    assert {s.metric for s in signals} == {"milestone-on-track-rate", "mean-goal-completion"}
    assert all(s.group_size == 7 for s in signals)
    on_track = next(s for s in signals if s.metric == "milestone-on-track-rate")
    assert on_track.value == pytest.approx(4 / 7)


def test_zero_consenting_students_emit_nothing():
    assert emit_aggregates("cohort-a", [], k_min=5) == []


def test_deployment_aggregates_respect_consent_and_k(deployment: Deployment):
    deployment.set_consent("alice", "alice", ConsentScope.AGGREGATE_SIGNALS, ConsentState.ON)
    # Only one consenting student against k_min=5: suppressed.
    assert deployment.aggregates("grs1") == []
    with pytest.raises(AuthorizationDenied):
        deployment.aggregates("alice")
    signals = deployment.aggregates("grs1", k_min=1)
    assert signals and all(s.group_size == 1 for s in signals)
