"""Deterministic scripted replays of whole study plans.

A script is a time-ordered list of actions executed against a virtual
millisecond clock, so a full 108-trial plan runs headless and reproduces
byte-identical records every time. The auto script plays each trial
perfectly: one utterance per trial with the speech technique, one minimap
pick per target with the baseline technique.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import minimap as mm
from .harness import StudyPlan, Technique, TrialRecord, TrialSpec
from .nlu import Lexicon
from .scene import Ray, generate_scene_cached
from .session import (
    IllegalPhase,
    Session,
    TrialNotActive,
    VirtualClock,
    make_plan_session,
)


class ScriptDesync(RuntimeError):
    """A script action arrived in a trial phase that cannot accept it."""


@dataclass(frozen=True)
class ScriptAction:
    at_ms: int
    kind: str  # start | say | ray | aim | pick | confirm | abort | next
    text: str = ""
    vec_a: tuple[float, float, float] = (0.0, 0.0, 0.0)  # ray/aim origin
    vec_b: tuple[float, float, float] = (0.0, 0.0, 0.0)  # ray/aim direction
    point: tuple[float, float] = (0.0, 0.0)
    half_angle: float = 0.0  # aim only; 0 means the minimap default


def serialize_script(script: Sequence[ScriptAction]) -> str:
    lines = []
    for a in script:
        if a.kind in ("start", "confirm", "abort", "next"):
            lines.append(f"{a.at_ms} {a.kind}")
        elif a.kind == "say":
            lines.append(f"{a.at_ms} say {a.text}")
        elif a.kind == "ray":
            vec = " ".join(repr(v) for v in (*a.vec_a, *a.vec_b))
            lines.append(f"{a.at_ms} ray {vec}")
        elif a.kind == "aim":
            vec = " ".join(repr(v) for v in (*a.vec_a, *a.vec_b, a.half_angle))
            lines.append(f"{a.at_ms} aim {vec}")
        elif a.kind == "pick":
            lines.append(f"{a.at_ms} pick {a.point[0]!r} {a.point[1]!r}")
        else:
            raise ValueError(f"unknown action kind {a.kind!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_script(text: str) -> list[ScriptAction]:
    script: list[ScriptAction] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        at_str, rest = line.split(" ", 1)
        at_ms = int(at_str)
        parts = rest.split(" ")
        kind = parts[0]
        if kind in ("start", "confirm", "abort", "next"):
            script.append(ScriptAction(at_ms, kind))
        elif kind == "say":
            script.append(ScriptAction(at_ms, "say", text=rest[len("say ") :]))
        elif kind == "ray":
            v = [float(p) for p in parts[1:7]]
            script.append(
                ScriptAction(at_ms, "ray", vec_a=(v[0], v[1], v[2]), vec_b=(v[3], v[4], v[5]))
            )
        elif kind == "aim":
            v = [float(p) for p in parts[1:8]]
            script.append(
                ScriptAction(
                    at_ms,
                    "aim",
                    vec_a=(v[0], v[1], v[2]),
                    vec_b=(v[3], v[4], v[5]),
                    half_angle=v[6],
                )
            )
        elif kind == "pick":
            script.append(
                ScriptAction(at_ms, "pick", point=(float(parts[1]), float(parts[2])))
            )
        else:
            raise ValueError(f"unknown script line: {raw!r}")
    return script


def _dispatch(session: Session, action: ScriptAction) -> None:
    try:
        if action.kind == "start":
            session.start_trial()
        elif action.kind == "say":
            session.submit_utterance(action.text)
        elif action.kind == "ray":
            session.submit_ray(Ray(action.vec_a, action.vec_b))
        elif action.kind == "aim":
            session.aim_minimap(
                action.vec_a, action.vec_b, action.half_angle or None
            )
        elif action.kind == "pick":
            session.submit_map_pick(action.point)
        elif action.kind == "confirm":
            session.confirm_selection()
        elif action.kind == "abort":
            session.abort_trial()
        elif action.kind == "next":
            session.next_trial()
        else:
            raise ValueError(f"unknown action kind {action.kind!r}")
    except (TrialNotActive, IllegalPhase) as err:
        raise ScriptDesync(f"{action.kind} at {action.at_ms} ms: {err}") from err


def run_trial(
    spec: TrialSpec,
    session: Session,
    actions: Sequence[ScriptAction],
    clock: VirtualClock,
) -> TrialRecord:
    """Drive the session's current trial with the given actions."""
    if session.current_spec() != spec:
        raise ScriptDesync("session cursor is not at the given spec")
    before = len(session.records)
    for action in actions:
        clock.set(action.at_ms)
        _dispatch(session, action)
    if len(session.records) == before:
        raise ScriptDesync("trial actions ended without a completed or aborted trial")
    return session.records[-1]


def replay_script(
    script: Sequence[ScriptAction],
    plan: StudyPlan,
    lexicon: Optional[Lexicon] = None,
) -> list[TrialRecord]:
    """Execute a script against a fresh plan session on a virtual clock."""
    clock = VirtualClock()
    session = make_plan_session(plan, lexicon=lexicon, clock=clock)
    for action in script:
        clock.set(action.at_ms)
        _dispatch(session, action)
    return list(session.records)


# -- the perfect scripted player ---------------------------------------------

_STEP_MS = 200
_SPEECH_AT_MS = 3400  # after the 3000 ms countdown
_PLAYER_CONE_HALF_ANGLE = 0.08  # narrow aim keeps the scripted minimap sparse


def _trial_actions(spec: TrialSpec, at_ms: int) -> tuple[list[ScriptAction], int]:
    """Actions that complete one trial on the first attempt, plus end time."""
    actions = [ScriptAction(at_ms, "start")]
    t = at_ms + _SPEECH_AT_MS
    if spec.technique is Technique.ASSIST_VR:
        shape, color = spec.target_pair
        actions.append(ScriptAction(t, "say", text=f"select the {color.phrase} {shape.phrase}"))
        t += _STEP_MS
    else:
        scene = generate_scene_cached(
            spec.perplexity, spec.num_targets, spec.scene_seed, spec.target_pair
        )
        origin = mm.MinimapConfig().cone_origin
        for target in scene.targets():
            cfg = mm.MinimapConfig(
                cone_origin=origin,
                cone_direction=_toward(origin, target.position),
                cone_half_angle=_PLAYER_CONE_HALF_ANGLE,
            )
            layout = mm.expand_overlaps(mm.project(scene, cfg), cfg)
            icon = next(ic for ic in layout.icons if ic.object_id == target.id)
            actions.append(
                ScriptAction(
                    t,
                    "aim",
                    vec_a=cfg.cone_origin,
                    vec_b=cfg.cone_direction,
                    half_angle=cfg.cone_half_angle,
                )
            )
            actions.append(ScriptAction(t + 100, "pick", point=icon.map_position))
            t += _STEP_MS + 100
    actions.append(ScriptAction(t, "confirm"))
    actions.append(ScriptAction(t + 100, "next"))
    return actions, t + _STEP_MS


def _toward(
    origin: tuple[float, float, float], at: tuple[float, float, float]
) -> tuple[float, float, float]:
    d = tuple(a - o for a, o in zip(at, origin))
    norm = sum(c * c for c in d) ** 0.5
    return (d[0] / norm, d[1] / norm, d[2] / norm)


def build_auto_script(plan: StudyPlan) -> list[ScriptAction]:
    """A script that plays every trial of the plan correctly in order."""
    script: list[ScriptAction] = []
    t = 0
    for spec in plan.specs:
        actions, t = _trial_actions(spec, t)
        script.extend(actions)
    return script
