"""Session lifecycle, trial machine, deltas, and scripted replays."""

from __future__ import annotations

import hashlib

import pytest

from vrselect.harness import Outcome, Technique, build_plan, serialize_records
from vrselect.replay import (
    ScriptAction,
    ScriptDesync,
    build_auto_script,
    parse_script,
    replay_script,
    run_trial,
    serialize_script,
)
from vrselect.scene import PerplexityLevel, Ray
from vrselect.session import (
    COUNTDOWN_MS,
    IllegalPhase,
    Session,
    TrialNotActive,
    TrialPhase,
    VirtualClock,
    WrongTechnique,
    make_adhoc_session,
    make_plan_session,
)


def _adhoc(technique=Technique.ASSIST_VR, **kw):
    clock = VirtualClock()
    session = make_adhoc_session(
        technique, kw.pop("level", PerplexityLevel.LOW), kw.pop("n", 1), kw.pop("seed", 42),
        clock=clock, **kw,
    )
    return session, clock


def _plan_session(participant="P00", order=0):
    clock = VirtualClock()
    plan = build_plan(participant, order)
    return make_plan_session(plan, clock=clock), clock, plan


def test_adhoc_scene_counts():
    session, _ = _adhoc()
    assert len(session.scene.objects) == 121
    assert session.trial_phase() is TrialPhase.FREE_PLAY


def test_technique_gating_utterance():
    session, _ = _adhoc(technique=Technique.DISC_PIM)
    with pytest.raises(WrongTechnique):
        session.submit_utterance("select the purple cube")


def test_technique_gating_map_pick():
    session, _ = _adhoc(technique=Technique.ASSIST_VR)
    with pytest.raises(WrongTechnique):
        session.submit_map_pick((0.0, 0.0))
    with pytest.raises(WrongTechnique):
        session.aim_minimap((0.0, 1.2, 0.0), (0.0, 0.0, 1.0))


def test_both_techniques_accept_rays():
    for technique in Technique:
        session, _ = _adhoc(technique=technique)
        delta = session.submit_ray(Ray((0.0, 1.6, 0.0), (0.0, 0.0, 1.0)))
        assert delta.seq == 1


def test_free_play_utterance_flow():
    session, _ = _adhoc()
    delta = session.submit_utterance("select all purple spheres")
    selected = {i for i, flag in delta.changed if flag}
    assert selected
    assert {e.object_id for e in delta.panel.entries} == selected
    delta2 = session.submit_utterance("deselect all")
    assert delta2.seq == 2
    assert delta2.panel.entries == ()


def test_unrecognized_utterance_notice():
    session, _ = _adhoc()
    delta = session.submit_utterance("blorp the florp")
    assert delta.panel.recognized_text == "speech not recognized"
    assert delta.changed == ()


def test_ambiguous_utterance_notice_without_change():
    session, _ = _adhoc()
    delta = session.submit_utterance("select the red cube and the blue sphere")
    assert "rephrase" in delta.notice
    assert delta.changed == ()


def test_empty_match_notice():
    session, _ = _adhoc()  # Low palette has no cross
    delta = session.submit_utterance("select the cross")
    assert delta.notice == "0 objects selected"


def test_trial_machine_lifecycle():
    session, clock = _plan_session()[0:2]
    assert session.trial_phase() is TrialPhase.READY
    with pytest.raises(TrialNotActive):
        session.submit_utterance("select the purple cube")
    session.start_trial()
    assert session.trial_phase() is TrialPhase.COUNTDOWN
    status = session.trial_status()
    assert status.countdown_remaining_ms == COUNTDOWN_MS
    with pytest.raises(TrialNotActive):
        session.submit_utterance("select the purple cube")
    clock.advance(COUNTDOWN_MS)
    assert session.trial_phase() is TrialPhase.ACTIVE
    spec = session.current_spec()
    shape, color = spec.target_pair
    clock.advance(400)
    session.submit_utterance(f"select the {color.phrase} {shape.phrase}")
    clock.advance(100)
    delta = session.confirm_selection()
    assert session.trial_phase() is TrialPhase.COMPLETED
    assert not delta.tone
    record = session.records[-1]
    assert record.outcome is Outcome.COMPLETED
    assert record.completion_ms == 500
    assert record.attempts == 1
    session.next_trial()
    assert session.trial_phase() is TrialPhase.READY
    assert session.cursor == 1


def test_wrong_confirm_counts_attempt_and_stays_active():
    session, clock, plan = _plan_session()
    session.start_trial()
    clock.advance(COUNTDOWN_MS + 100)
    delta = session.confirm_selection()  # nothing selected yet
    assert delta.tone
    assert session.trial_phase() is TrialPhase.ACTIVE
    spec = session.current_spec()
    shape, color = spec.target_pair
    clock.advance(100)
    session.submit_utterance(f"select the {color.phrase} {shape.phrase}")
    clock.advance(100)
    session.confirm_selection()
    record = session.records[-1]
    assert record.attempts == 2
    assert record.completion_ms == 300
    confirms = [e for e in record.events if e.kind.value == "Confirm"]
    assert [e.text for e in confirms] == ["incorrect", "correct"]


def test_abort_saves_aborted_record():
    session, clock, _ = _plan_session()
    session.start_trial()
    clock.advance(COUNTDOWN_MS + 50)
    session.abort_trial()
    record = session.records[-1]
    assert record.outcome is Outcome.ABORTED
    assert session.trial_phase() is TrialPhase.COMPLETED


def test_illegal_phase_errors():
    session, clock, _ = _plan_session()
    with pytest.raises(IllegalPhase):
        session.next_trial()
    with pytest.raises(IllegalPhase):
        session.confirm_selection()
    session.start_trial()
    with pytest.raises(IllegalPhase):
        session.start_trial()


def test_plan_session_technique_follows_cursor():
    session, clock, plan = _plan_session(order=0)
    assert session.technique is Technique.ASSIST_VR  # block one
    assert plan.specs[54].technique is Technique.DISC_PIM


def test_delta_sequence_strictly_increases():
    session, _ = _adhoc()
    seqs = []
    for text in ("select the red cube", "select the blue sphere", "deselect all"):
        seqs.append(session.submit_utterance(text).seq)
    assert seqs == sorted(set(seqs))


def test_snapshot_reflects_full_state():
    session, _ = _adhoc()
    session.submit_utterance("select all red cylinders")
    snapshot = session.snapshot_delta()
    assert snapshot.kind == "snapshot"
    assert {i for i, flag in snapshot.changed if flag} == session.state.selected
    assert snapshot.seq == 1


def test_scene_payload_shape():
    session, _ = _adhoc()
    payload = session.scene_payload()
    assert payload["v"] == 1
    assert len(payload["objects"]) == 121
    assert payload["target_pair"]["shape"]
    assert payload["search_region"]["radius"] > 0


# -- scripted replays ---------------------------------------------------------

def test_replay_deterministic_and_repeat_scenes_match():
    plan = build_plan("P10", 4)
    script = build_auto_script(plan)
    records_a = replay_script(script, plan)
    records_b = replay_script(script, plan)
    assert serialize_records(records_a) == serialize_records(records_b)
    assert len(records_a) == 108
    for search, repeat in zip(records_a[0::2], records_a[1::2]):
        assert search.spec.phase.value == "search"
        assert repeat.spec.phase.value == "repeat"
        assert search.scene_text == repeat.scene_text
        assert search.scene_sha256 == repeat.scene_sha256
        assert (
            hashlib.sha256(search.scene_text.encode()).hexdigest() == search.scene_sha256
        )


def test_replay_script_desync_on_early_action():
    plan = build_plan("P11", 0)
    script = [ScriptAction(0, "start"), ScriptAction(10, "say", text="select the purple cube")]
    with pytest.raises(ScriptDesync):
        replay_script(script, plan)


def test_script_round_trip():
    plan = build_plan("P12", 1)
    script = build_auto_script(plan)
    assert parse_script(serialize_script(script)) == script


def test_run_trial_single():
    plan = build_plan("P13", 0)
    clock = VirtualClock()
    session = make_plan_session(plan, clock=clock)
    spec = plan.specs[0]
    shape, color = spec.target_pair
    actions = [
        ScriptAction(0, "start"),
        ScriptAction(3200, "say", text=f"select the {color.phrase} {shape.phrase}"),
        ScriptAction(3400, "confirm"),
    ]
    record = run_trial(spec, session, actions, clock)
    assert record.outcome is Outcome.COMPLETED
    assert record.attempts == 1
    assert record.completion_ms == 400


def test_virtual_clock_rejects_backwards_motion():
    clock = VirtualClock()
    clock.set(100)
    with pytest.raises(ValueError):
        clock.set(50)


def test_record_clocks_are_monotonic_with_consistent_completion():
    plan = build_plan("P14", 2)
    records = replay_script(build_auto_script(plan), plan)
    for record in records:
        stamps = [e.at_ms for e in record.events]
        assert stamps == sorted(stamps)
        assert record.completion_ms >= 0
        confirms = [e for e in record.events if e.kind.value == "Confirm"]
        assert confirms and confirms[-1].text == "correct"
        assert record.attempts == len(confirms)
