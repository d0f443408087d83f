"""Selection state, command resolution, and the feedback panel model.

Speech selection is additive: a Select with only a color adds every object
of that color, only a shape adds every object of that shape, and both adds
the conjunction. CancelAll empties the selection, None changes nothing.
Ray hits and minimap picks toggle a single object. Every change appends to
an event log that replays to the current selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Optional

from .nlu import AmbiguousCommand, CommandInterpretation, Intent
from .scene import ColorKind, Ray, Scene, ShapeKind, raycast

NOT_RECOGNIZED_NOTICE = "speech not recognized"


class EventKind(Enum):
    SPEECH_SELECT = "SpeechSelect"
    SPEECH_CANCEL_ALL = "SpeechCancelAll"
    SPEECH_NONE = "SpeechNone"
    SPEECH_AMBIGUOUS = "SpeechAmbiguous"
    RAY_SELECT = "RaySelect"
    RAY_DESELECT = "RayDeselect"
    CONFIRM = "Confirm"


@dataclass(frozen=True)
class SelectionEvent:
    at_ms: int
    kind: EventKind
    ids: tuple[str, ...] = ()
    text: str = ""


@dataclass
class SelectionState:
    """Ordered set of selected ids plus an append-only event log."""

    _selected: dict[str, None] = field(default_factory=dict)
    events: list[SelectionEvent] = field(default_factory=list)

    @property
    def selected(self) -> set[str]:
        return set(self._selected)

    def selection_order(self) -> list[str]:
        return list(self._selected)

    def _append(self, event: SelectionEvent) -> None:
        if self.events and event.at_ms < self.events[-1].at_ms:
            raise ValueError(
                f"event timestamps must be nondecreasing: {event.at_ms} < {self.events[-1].at_ms}"
            )
        self.events.append(event)

    def _add(self, object_id: str) -> None:
        if object_id not in self._selected:
            self._selected[object_id] = None

    def _remove(self, object_id: str) -> None:
        self._selected.pop(object_id, None)

    def _clear(self) -> None:
        self._selected.clear()


@dataclass(frozen=True)
class PanelEntry:
    object_id: str
    shape: ShapeKind
    color: ColorKind


@dataclass(frozen=True)
class PanelModel:
    recognized_text: str
    entries: tuple[PanelEntry, ...]


def matching_ids(
    scene: Scene, color: Optional[ColorKind], shape: Optional[ShapeKind]
) -> list[str]:
    """Object ids matching the given color and/or shape, in scene order."""
    out = []
    for o in scene.objects:
        if color is not None and o.color is not color:
            continue
        if shape is not None and o.shape is not shape:
            continue
        out.append(o.id)
    return out


def apply_speech(
    scene: Scene, state: SelectionState, cmd: CommandInterpretation, at_ms: int = 0
) -> tuple[SelectionState, set[str]]:
    """Resolve one interpreted command against the scene.

    Returns the state and the set of ids the command referred to (the full
    match for Select, everything cleared for CancelAll, empty for None).
    """
    if cmd.intent.intent is Intent.SELECT:
        color, shape = cmd.color(), cmd.shape()
        ids = matching_ids(scene, color, shape)
        for object_id in ids:
            state._add(object_id)
        state._append(
            SelectionEvent(at_ms, EventKind.SPEECH_SELECT, tuple(ids), cmd.recognized_text)
        )
        return state, set(ids)
    if cmd.intent.intent is Intent.CANCEL_ALL:
        cleared = tuple(state.selection_order())
        state._clear()
        state._append(
            SelectionEvent(at_ms, EventKind.SPEECH_CANCEL_ALL, cleared, cmd.recognized_text)
        )
        return state, set(cleared)
    state._append(SelectionEvent(at_ms, EventKind.SPEECH_NONE, (), cmd.recognized_text))
    return state, set()


def record_ambiguous(
    state: SelectionState, error: AmbiguousCommand, at_ms: int = 0
) -> SelectionState:
    """Log an ambiguous command without touching the selection."""
    state._append(
        SelectionEvent(at_ms, EventKind.SPEECH_AMBIGUOUS, (), error.recognized_text)
    )
    return state


def toggle(
    scene: Scene, state: SelectionState, object_id: str, at_ms: int = 0, source: str = "ray"
) -> tuple[SelectionState, tuple[str, bool]]:
    """Flip one object's membership; used by ray hits and minimap picks."""
    if object_id in state._selected:
        state._remove(object_id)
        state._append(SelectionEvent(at_ms, EventKind.RAY_DESELECT, (object_id,), source))
        return state, (object_id, False)
    state._add(object_id)
    state._append(SelectionEvent(at_ms, EventKind.RAY_SELECT, (object_id,), source))
    return state, (object_id, True)


def apply_ray(
    scene: Scene, state: SelectionState, ray: Ray, at_ms: int = 0
) -> tuple[SelectionState, Optional[tuple[str, bool]]]:
    """Toggle the nearest object hit by the ray; a miss changes nothing."""
    result = raycast(scene, ray)
    if result.hit is None:
        return state, None
    state, outcome = toggle(scene, state, result.hit.object_id, at_ms, source="ray")
    return state, outcome


def confirm(scene: Scene, state: SelectionState, at_ms: int = 0) -> bool:
    """True iff the selection is exactly the target set; logs the attempt."""
    targets = {o.id for o in scene.objects if o.is_target}
    correct = state.selected == targets
    state._append(
        SelectionEvent(
            at_ms,
            EventKind.CONFIRM,
            tuple(state.selection_order()),
            "correct" if correct else "incorrect",
        )
    )
    return correct


def panel_view(
    scene: Scene, state: SelectionState, last: Optional[CommandInterpretation] = None
) -> PanelModel:
    """Panel contents: last recognized utterance and all selected objects.

    Shows the not-recognized notice when there is no usable interpretation.
    Entries follow selection order.
    """
    if last is None or last.intent.intent is Intent.NONE:
        text = NOT_RECOGNIZED_NOTICE
    else:
        text = last.recognized_text
    entries = []
    for object_id in state.selection_order():
        obj = scene.object_by_id(object_id)
        entries.append(PanelEntry(object_id, obj.shape, obj.color))
    return PanelModel(recognized_text=text, entries=tuple(entries))


def replay_events(events: Iterable[SelectionEvent]) -> list[str]:
    """Fold an event log into the selected-id list it produces."""
    selected: dict[str, None] = {}
    for ev in events:
        if ev.kind is EventKind.SPEECH_SELECT:
            for object_id in ev.ids:
                selected.setdefault(object_id, None)
        elif ev.kind is EventKind.SPEECH_CANCEL_ALL:
            selected.clear()
        elif ev.kind is EventKind.RAY_SELECT:
            selected.setdefault(ev.ids[0], None)
        elif ev.kind is EventKind.RAY_DESELECT:
            selected.pop(ev.ids[0], None)
    return list(selected)


def format_event(event: SelectionEvent) -> str:
    ids = ",".join(event.ids) if event.ids else "-"
    text = event.text if event.text else "-"
    return f"{event.at_ms}\t{event.kind.value}\t{ids}\t{text}"


def parse_event(line: str) -> SelectionEvent:
    at_ms, kind, ids, text = line.rstrip("\n").split("\t", 3)
    return SelectionEvent(
        at_ms=int(at_ms),
        kind=EventKind(kind),
        ids=() if ids == "-" else tuple(ids.split(",")),
        text="" if text == "-" else text,
    )


class EventLogWriter:
    """Append-only event sink, flushed per event."""

    def __init__(self, stream: IO[str]):
        self._stream = stream

    def write(self, event: SelectionEvent) -> None:
        self._stream.write(format_event(event) + "\n")
        self._stream.flush()
