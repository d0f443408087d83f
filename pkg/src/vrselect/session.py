"""Session state machine shared by the HTTP service and scripted replays.

A session owns one scene, one selection state, and (in plan mode) a cursor
into a 108-spec study plan. Every mutation produces a StateDelta with a
strictly increasing sequence number; subscribers that join late get a
snapshot delta first. Callers must serialize mutations per session; the
service layer does that with a per-session lock.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from . import minimap as mm
from . import selection as sel
from .harness import Outcome, StudyPlan, Technique, TrialRecord, TrialSpec
from .nlu import AmbiguousCommand, CommandInterpretation, Intent, Lexicon, default_lexicon, interpret
from .scene import PerplexityLevel, Ray, Scene, ShapeKind, ColorKind, generate_scene_cached, serialize_scene

COUNTDOWN_MS = 3000


class SessionError(Exception):
    pass


class NoSuchSession(SessionError):
    pass


class BadParams(SessionError):
    pass


class WrongTechnique(SessionError):
    pass


class TrialNotActive(SessionError):
    pass


class IllegalPhase(SessionError):
    pass


class TrialPhase(Enum):
    FREE_PLAY = "free_play"
    READY = "ready"
    COUNTDOWN = "countdown"
    ACTIVE = "active"
    COMPLETED = "completed"
    FINISHED = "finished"  # plan exhausted


class VirtualClock:
    """Millisecond clock a replay steps forward explicitly."""

    def __init__(self, start_ms: int = 0):
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def set(self, at_ms: int) -> None:
        if at_ms < self._now:
            raise ValueError(f"virtual clock cannot go backwards: {at_ms} < {self._now}")
        self._now = at_ms

    def advance(self, delta_ms: int) -> None:
        self.set(self._now + delta_ms)


class WallClock:
    def __init__(self) -> None:
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)


@dataclass(frozen=True)
class TrialStatus:
    phase: TrialPhase
    countdown_remaining_ms: int = 0
    attempts: int = 0
    elapsed_ms: int = 0
    cursor: int = 0
    total: int = 0


@dataclass(frozen=True)
class StateDelta:
    seq: int
    kind: str  # "delta" or "snapshot"
    changed: tuple[tuple[str, bool], ...]
    panel: sel.PanelModel
    trial: TrialStatus
    notice: str = ""
    tone: bool = False

    def to_payload(self) -> dict[str, Any]:
        return {
            "v": 1,
            "seq": self.seq,
            "kind": self.kind,
            "changed": [{"id": i, "selected": s} for i, s in self.changed],
            "panel": {
                "recognized_text": self.panel.recognized_text,
                "entries": [
                    {"id": e.object_id, "shape": e.shape.value, "color": e.color.value}
                    for e in self.panel.entries
                ],
            },
            "trial": {
                "phase": self.trial.phase.value,
                "countdown_remaining_ms": self.trial.countdown_remaining_ms,
                "attempts": self.trial.attempts,
                "elapsed_ms": self.trial.elapsed_ms,
                "cursor": self.trial.cursor,
                "total": self.trial.total,
            },
            "notice": self.notice,
            "tone": self.tone,
        }


_session_counter = itertools.count(1)


class Session:
    """One client's scene, selection, minimap, and trial lifecycle."""

    def __init__(
        self,
        technique: Technique,
        scene: Optional[Scene] = None,
        plan: Optional[StudyPlan] = None,
        lexicon: Optional[Lexicon] = None,
        clock=None,
        session_id: Optional[str] = None,
    ):
        if (scene is None) == (plan is None):
            raise BadParams("provide exactly one of scene or plan")
        self.id = session_id or f"s{next(_session_counter):04d}"
        self._fixed_technique = technique
        self.plan = plan
        self.cursor = 0
        self.lexicon = lexicon if lexicon is not None else default_lexicon()
        self.clock = clock if clock is not None else WallClock()
        self.records: list[TrialRecord] = []
        self.last_interpretation: Optional[CommandInterpretation] = None
        self.minimap_layout: Optional[mm.MinimapLayout] = None
        self._seq = 0
        self._trial_started_at: Optional[int] = None
        self._trial_completed = False
        self._attempts = 0
        if plan is not None:
            self._bind_current_spec()
        else:
            self.scene = scene
            self.state = sel.SelectionState()

    # -- mode and technique -------------------------------------------------

    @property
    def free_play(self) -> bool:
        return self.plan is None

    @property
    def technique(self) -> Technique:
        spec = self.current_spec()
        if spec is not None:
            return spec.technique
        return self._fixed_technique

    def current_spec(self) -> Optional[TrialSpec]:
        if self.plan is None or self.cursor >= len(self.plan.specs):
            return None
        return self.plan.specs[self.cursor]

    def _bind_current_spec(self) -> None:
        spec = self.current_spec()
        if spec is None:
            return
        self.scene = generate_scene_cached(
            spec.perplexity, spec.num_targets, spec.scene_seed, spec.target_pair
        )
        self.state = sel.SelectionState()
        self.last_interpretation = None
        self.minimap_layout = None
        self._trial_started_at = None
        self._trial_completed = False
        self._attempts = 0

    # -- trial machine ------------------------------------------------------

    def trial_phase(self) -> TrialPhase:
        if self.free_play:
            return TrialPhase.FREE_PLAY
        if self.current_spec() is None:
            return TrialPhase.FINISHED
        if self._trial_started_at is None:
            return TrialPhase.READY
        if self._trial_completed:
            return TrialPhase.COMPLETED
        if self.clock.now_ms() < self._trial_started_at + COUNTDOWN_MS:
            return TrialPhase.COUNTDOWN
        return TrialPhase.ACTIVE

    def _countdown_end(self) -> int:
        assert self._trial_started_at is not None
        return self._trial_started_at + COUNTDOWN_MS

    def trial_status(self) -> TrialStatus:
        phase = self.trial_phase()
        now = self.clock.now_ms()
        remaining = 0
        elapsed = 0
        if phase is TrialPhase.COUNTDOWN:
            remaining = self._countdown_end() - now
        if phase in (TrialPhase.ACTIVE, TrialPhase.COMPLETED):
            elapsed = max(0, now - self._countdown_end())
        total = len(self.plan.specs) if self.plan is not None else 0
        return TrialStatus(
            phase=phase,
            countdown_remaining_ms=remaining,
            attempts=self._attempts,
            elapsed_ms=elapsed,
            cursor=self.cursor,
            total=total,
        )

    def _require_active(self) -> None:
        phase = self.trial_phase()
        if phase is TrialPhase.FREE_PLAY or phase is TrialPhase.ACTIVE:
            return
        raise TrialNotActive(f"trial phase is {phase.value}")

    # -- deltas --------------------------------------------------------------

    def _delta(
        self,
        changed: tuple[tuple[str, bool], ...] = (),
        notice: str = "",
        tone: bool = False,
        kind: str = "delta",
    ) -> StateDelta:
        self._seq += 1
        return StateDelta(
            seq=self._seq,
            kind=kind,
            changed=changed,
            panel=sel.panel_view(self.scene, self.state, self.last_interpretation),
            trial=self.trial_status(),
            notice=notice,
            tone=tone,
        )

    def snapshot_delta(self) -> StateDelta:
        """Full-state delta for late subscribers; does not bump the sequence."""
        return StateDelta(
            seq=self._seq,
            kind="snapshot",
            changed=tuple((i, True) for i in self.state.selection_order()),
            panel=sel.panel_view(self.scene, self.state, self.last_interpretation),
            trial=self.trial_status(),
        )

    # -- interaction --------------------------------------------------------

    def submit_utterance(self, text: str) -> StateDelta:
        if self.technique is not Technique.ASSIST_VR:
            raise WrongTechnique("utterances are only accepted on assistvr sessions")
        self._require_active()
        now = self.clock.now_ms()
        before = self.state.selected
        try:
            cmd = interpret(text, self.lexicon)
        except AmbiguousCommand as err:
            sel.record_ambiguous(self.state, err, now)
            return self._delta(
                notice="more than one color or shape named; please rephrase"
            )
        self.last_interpretation = cmd
        _, affected = sel.apply_speech(self.scene, self.state, cmd, now)
        after = self.state.selected
        changed = tuple(
            (i, i in after) for i in self._scene_order(before.symmetric_difference(after))
        )
        notice = ""
        if cmd.intent.intent is Intent.SELECT and not affected:
            notice = "0 objects selected"
        return self._delta(changed=changed, notice=notice)

    def submit_ray(self, ray: Ray) -> StateDelta:
        self._require_active()
        now = self.clock.now_ms()
        _, outcome = sel.apply_ray(self.scene, self.state, ray, now)
        if outcome is None:
            return self._delta()
        object_id, now_selected = outcome
        return self._delta(changed=((object_id, now_selected),))

    def aim_minimap(
        self,
        origin: tuple[float, float, float],
        direction: tuple[float, float, float],
        half_angle: Optional[float] = None,
    ) -> StateDelta:
        if self.technique is not Technique.DISC_PIM:
            raise WrongTechnique("the minimap is only available on discpim sessions")
        self._require_active()
        kwargs = {} if half_angle is None else {"cone_half_angle": half_angle}
        cfg = mm.MinimapConfig(cone_origin=origin, cone_direction=direction, **kwargs)
        self.minimap_layout = mm.expand_overlaps(mm.project(self.scene, cfg), cfg)
        return self._delta(notice="minimap frozen")

    def submit_map_pick(self, point: tuple[float, float]) -> StateDelta:
        if self.technique is not Technique.DISC_PIM:
            raise WrongTechnique("map picks are only accepted on discpim sessions")
        self._require_active()
        if self.minimap_layout is None:
            raise IllegalPhase("no minimap layout; aim the minimap first")
        object_id = mm.pick_from_minimap(self.minimap_layout, point)
        if object_id is None:
            return self._delta()
        now = self.clock.now_ms()
        _, (object_id, now_selected) = sel.toggle(
            self.scene, self.state, object_id, now, source="map-pick"
        )
        return self._delta(changed=((object_id, now_selected),))

    def _scene_order(self, ids: set[str]) -> list[str]:
        return [o.id for o in self.scene.objects if o.id in ids]

    # -- trial control ------------------------------------------------------

    def trial_control(self, verb: str) -> StateDelta:
        if verb == "start":
            return self.start_trial()
        if verb == "confirm":
            return self.confirm_selection()
        if verb == "abort":
            return self.abort_trial()
        if verb == "next":
            return self.next_trial()
        raise BadParams(f"unknown trial verb {verb!r}")

    def start_trial(self) -> StateDelta:
        if self.free_play:
            raise IllegalPhase("free-play sessions have no timed trials")
        if self.trial_phase() is not TrialPhase.READY:
            raise IllegalPhase(f"cannot start from phase {self.trial_phase().value}")
        self._trial_started_at = self.clock.now_ms()
        return self._delta(notice="countdown started")

    def confirm_selection(self) -> StateDelta:
        if self.free_play:
            correct = sel.confirm(self.scene, self.state, self.clock.now_ms())
            return self._delta(notice="correct" if correct else "incorrect", tone=not correct)
        if self.trial_phase() is not TrialPhase.ACTIVE:
            raise IllegalPhase(f"cannot confirm in phase {self.trial_phase().value}")
        now = self.clock.now_ms()
        self._attempts += 1
        correct = sel.confirm(self.scene, self.state, now)
        if not correct:
            return self._delta(notice="incorrect selection, try again", tone=True)
        self._trial_completed = True
        self._finalize_record(Outcome.COMPLETED, completion_ms=now - self._countdown_end())
        return self._delta(notice="trial complete")

    def abort_trial(self) -> StateDelta:
        if self.free_play:
            raise IllegalPhase("free-play sessions have no timed trials")
        phase = self.trial_phase()
        if phase not in (TrialPhase.COUNTDOWN, TrialPhase.ACTIVE):
            raise IllegalPhase(f"cannot abort in phase {phase.value}")
        now = self.clock.now_ms()
        elapsed = max(0, now - self._countdown_end())
        self._trial_completed = True
        self._finalize_record(Outcome.ABORTED, completion_ms=elapsed)
        return self._delta(notice="trial aborted")

    def next_trial(self) -> StateDelta:
        if self.free_play:
            raise IllegalPhase("free-play sessions have no timed trials")
        if self.trial_phase() is not TrialPhase.COMPLETED:
            raise IllegalPhase("next is only legal after a completed trial")
        self.cursor += 1
        self._bind_current_spec()
        return self._delta(notice="advanced to next trial")

    def _finalize_record(self, outcome: Outcome, completion_ms: int) -> None:
        spec = self.current_spec()
        assert spec is not None
        scene_text = serialize_scene(self.scene)
        self.records.append(
            TrialRecord(
                spec=spec,
                completion_ms=completion_ms,
                attempts=self._attempts,
                events=list(self.state.events),
                outcome=outcome,
                scene_sha256=hashlib.sha256(scene_text.encode()).hexdigest(),
                scene_text=scene_text,
            )
        )

    # -- structured views ----------------------------------------------------

    def scene_payload(self) -> dict[str, Any]:
        spec = self.current_spec()
        targets = self.scene.targets()
        pair: tuple[ShapeKind, ColorKind]
        if spec is not None:
            pair = spec.target_pair
        else:
            pair = self.scene.target_pair() if targets else (None, None)  # type: ignore[assignment]
        return {
            "v": 1,
            "level": self.scene.perplexity.value,
            "num_targets": self.scene.num_targets,
            "seed": self.scene.seed,
            "technique": self.technique.value,
            "viewpoint": [0.0, 1.6, 0.0],
            "search_region": {
                "center": list(self.scene.search_region_center),
                "radius": self.scene.search_region_radius,
            },
            "target_pair": {
                "shape": pair[0].value if pair[0] else "",
                "color": pair[1].value if pair[1] else "",
            },
            "objects": [
                {
                    "id": o.id,
                    "shape": o.shape.value,
                    "color": o.color.value,
                    "position": list(o.position),
                    "orientation": list(o.orientation),
                    "radius": o.bounding_radius,
                    "target": o.is_target,
                }
                for o in self.scene.objects
            ],
        }

    def minimap_payload(self) -> dict[str, Any]:
        layout = self.minimap_layout
        if layout is None:
            return {"v": 1, "frozen": False, "icons": [], "disc_radius": 0.0, "icon_radius": 0.0}
        return {
            "v": 1,
            "frozen": layout.frozen,
            "disc_radius": layout.cfg.disc_radius,
            "icon_radius": layout.cfg.icon_radius,
            "icons": [
                {
                    "id": ic.object_id,
                    "x": ic.map_position[0],
                    "y": ic.map_position[1],
                    "expanded": ic.expanded,
                    "angle": ic.anchor_angle,
                }
                for ic in layout.icons
            ],
        }


def make_adhoc_session(
    technique: Technique,
    level: PerplexityLevel,
    num_targets: int,
    seed: int,
    target_override: Optional[tuple[ShapeKind, ColorKind]] = None,
    lexicon: Optional[Lexicon] = None,
    clock=None,
) -> Session:
    scene = generate_scene_cached(level, num_targets, seed, target_override)
    return Session(technique=technique, scene=scene, lexicon=lexicon, clock=clock)


def make_plan_session(
    plan: StudyPlan, lexicon: Optional[Lexicon] = None, clock=None
) -> Session:
    return Session(
        technique=plan.specs[0].technique, plan=plan, lexicon=lexicon, clock=clock
    )
