"""Trial protocol: counterbalanced plans, records, outlier filter, summaries.

A participant's plan is 108 trial specs: 2 techniques x 3 difficulty levels
x 3 target counts x 3 sets x (search + repeat). Technique order alternates
with the participant's order index, level order follows a balanced Latin
square, and each repeat trial reuses its search trial's scene seed and
target pair so the repeated scene is byte-identical.
"""

from __future__ import annotations

import hashlib
import math
import random
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .scene import ColorKind, PerplexityLevel, ShapeKind, palette_pairs
from .selection import SelectionEvent, format_event, parse_event


class Technique(Enum):
    ASSIST_VR = "assistvr"
    DISC_PIM = "discpim"


class TrialPhaseKind(Enum):
    SEARCH = "search"
    REPEAT = "repeat"


class Outcome(Enum):
    COMPLETED = "completed"
    ABORTED = "aborted"


NUM_TARGET_ORDER = (1, 2, 4)
SETS_PER_CELL = 3
ORDER_INDEX_COUNT = 24
SPECS_PER_PLAN = 108

# Balanced Latin square (Williams design) over the three difficulty levels:
# across the six rows every level leads exactly twice.
_L, _M, _H = PerplexityLevel.LOW, PerplexityLevel.MEDIUM, PerplexityLevel.HIGH
PERPLEXITY_SEQUENCES: tuple[tuple[PerplexityLevel, ...], ...] = (
    (_L, _M, _H),
    (_M, _H, _L),
    (_H, _L, _M),
    (_H, _M, _L),
    (_L, _H, _M),
    (_M, _L, _H),
)


@dataclass(frozen=True)
class TrialSpec:
    participant: str
    technique: Technique
    perplexity: PerplexityLevel
    num_targets: int
    set_index: int
    phase: TrialPhaseKind
    scene_seed: int
    target_pair: tuple[ShapeKind, ColorKind]

    def condition_key(self) -> tuple[str, str, int, str]:
        return (
            self.technique.value,
            self.perplexity.value,
            self.num_targets,
            self.phase.value,
        )


@dataclass
class StudyPlan:
    participant: str
    specs: list[TrialSpec]


def _digest_seed(*parts: object) -> int:
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def build_plan(participant: str, order_index: int) -> StudyPlan:
    """Counterbalanced 108-spec plan for one participant slot.

    Technique order alternates with order_index parity; level order is the
    Latin square row order_index mod 6, applied inside both technique
    blocks. Target counts ascend inside a level. One scene seed per
    (technique, level) block keeps distractor placement fixed while the
    three sets draw three distinct target pairs.
    """
    if participant != "".join(participant.split()) or not participant:
        raise ValueError("participant id must be nonempty with no whitespace")
    if not 0 <= order_index < ORDER_INDEX_COUNT:
        raise ValueError(f"order_index must be in 0..{ORDER_INDEX_COUNT - 1}")
    plan_seed = _digest_seed("plan", participant, order_index)
    if order_index % 2 == 0:
        techniques = (Technique.ASSIST_VR, Technique.DISC_PIM)
    else:
        techniques = (Technique.DISC_PIM, Technique.ASSIST_VR)
    levels = PERPLEXITY_SEQUENCES[order_index % 6]

    specs: list[TrialSpec] = []
    for technique in techniques:
        for level in levels:
            scene_seed = _digest_seed("scene", plan_seed, technique.value, level.value)
            for num_targets in NUM_TARGET_ORDER:
                rng = random.Random(
                    f"pairs:{plan_seed}:{technique.value}:{level.value}:{num_targets}"
                )
                chosen = rng.sample(palette_pairs(level), SETS_PER_CELL)
                for set_index in range(1, SETS_PER_CELL + 1):
                    for phase in (TrialPhaseKind.SEARCH, TrialPhaseKind.REPEAT):
                        specs.append(
                            TrialSpec(
                                participant=participant,
                                technique=technique,
                                perplexity=level,
                                num_targets=num_targets,
                                set_index=set_index,
                                phase=phase,
                                scene_seed=scene_seed,
                                target_pair=chosen[set_index - 1],
                            )
                        )
    assert len(specs) == SPECS_PER_PLAN
    return StudyPlan(participant=participant, specs=specs)


@dataclass
class TrialRecord:
    spec: TrialSpec
    completion_ms: int
    attempts: int
    events: list[SelectionEvent]
    outcome: Outcome
    scene_sha256: str = ""
    scene_text: str = field(default="", repr=False)


@dataclass(frozen=True)
class ConditionSummary:
    technique: Technique
    perplexity: PerplexityLevel
    num_targets: int
    phase: TrialPhaseKind
    n: int
    mean_ms: float
    sd_ms: float
    ci95_halfwidth_ms: float
    removed_outliers: int


def _group_indices(records: Sequence[TrialRecord]) -> dict[tuple, list[int]]:
    groups: dict[tuple, list[int]] = {}
    for i, record in enumerate(records):
        groups.setdefault(record.spec.condition_key(), []).append(i)
    return groups


def filter_outliers(
    records: Sequence[TrialRecord], sd_limit: float = 4.0
) -> tuple[list[TrialRecord], list[TrialRecord]]:
    """Single-pass removal of per-condition extremes.

    A record is dropped when its completion time sits strictly more than
    sd_limit sample standard deviations from its condition's mean, both
    computed once on the unfiltered group. Groups smaller than two pass
    through untouched.
    """
    drop = [False] * len(records)
    for indices in _group_indices(records).values():
        if len(indices) < 2:
            continue
        times = [records[i].completion_ms for i in indices]
        mean = statistics.fmean(times)
        sd = statistics.stdev(times)
        for i in indices:
            if abs(records[i].completion_ms - mean) > sd_limit * sd:
                drop[i] = True
    kept = [r for i, r in enumerate(records) if not drop[i]]
    removed = [r for i, r in enumerate(records) if drop[i]]
    return kept, removed


_CONDITION_SORT = {
    "technique": [t.value for t in Technique],
    "perplexity": [p.value for p in PerplexityLevel],
    "phase": [p.value for p in TrialPhaseKind],
}


def _condition_sort_key(key: tuple[str, str, int, str]) -> tuple[int, int, int, int]:
    technique, perplexity, num_targets, phase = key
    return (
        _CONDITION_SORT["technique"].index(technique),
        _CONDITION_SORT["perplexity"].index(perplexity),
        num_targets,
        _CONDITION_SORT["phase"].index(phase),
    )


def summarize(
    records: Sequence[TrialRecord], removed: Sequence[TrialRecord] = ()
) -> list[ConditionSummary]:
    """Per-condition mean, sample sd, and normal-approximation 95% CI.

    ``records`` should already be outlier-filtered; pass the removed ones
    to carry their counts into the summary rows.
    """
    removed_counts: dict[tuple, int] = {}
    for record in removed:
        key = record.spec.condition_key()
        removed_counts[key] = removed_counts.get(key, 0) + 1
    groups = _group_indices(records)
    for key in removed_counts:
        groups.setdefault(key, [])

    out: list[ConditionSummary] = []
    for key in sorted(groups, key=_condition_sort_key):
        indices = groups[key]
        times = [records[i].completion_ms for i in indices]
        n = len(times)
        mean = statistics.fmean(times) if n else 0.0
        sd = statistics.stdev(times) if n >= 2 else 0.0
        ci = 1.96 * sd / math.sqrt(n) if n else 0.0
        technique, perplexity, num_targets, phase = key
        out.append(
            ConditionSummary(
                technique=Technique(technique),
                perplexity=PerplexityLevel(perplexity),
                num_targets=num_targets,
                phase=TrialPhaseKind(phase),
                n=n,
                mean_ms=mean,
                sd_ms=sd,
                ci95_halfwidth_ms=ci,
                removed_outliers=removed_counts.get(key, 0),
            )
        )
    return out


def serialize_records(records: Iterable[TrialRecord]) -> str:
    """Append-only log form: one record header line plus its event lines."""
    lines: list[str] = []
    for r in records:
        s = r.spec
        lines.append(
            "record %s %s %s %d %d %s %d %s %s %d %d %s %s"
            % (
                s.participant,
                s.technique.value,
                s.perplexity.value,
                s.num_targets,
                s.set_index,
                s.phase.value,
                s.scene_seed,
                s.target_pair[0].value,
                s.target_pair[1].value,
                r.completion_ms,
                r.attempts,
                r.outcome.value,
                r.scene_sha256 or "-",
            )
        )
        for event in r.events:
            lines.append("event\t" + format_event(event))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_records(text: str) -> list[TrialRecord]:
    records: list[TrialRecord] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("record "):
            f = line.split()
            if len(f) != 14:
                raise ValueError(f"bad record header: {line!r}")
            spec = TrialSpec(
                participant=f[1],
                technique=Technique(f[2]),
                perplexity=PerplexityLevel(f[3]),
                num_targets=int(f[4]),
                set_index=int(f[5]),
                phase=TrialPhaseKind(f[6]),
                scene_seed=int(f[7]),
                target_pair=(ShapeKind(f[8]), ColorKind(f[9])),
            )
            records.append(
                TrialRecord(
                    spec=spec,
                    completion_ms=int(f[10]),
                    attempts=int(f[11]),
                    outcome=Outcome(f[12]),
                    scene_sha256="" if f[13] == "-" else f[13],
                    events=[],
                )
            )
        elif line.startswith("event\t"):
            if not records:
                raise ValueError("event line before any record header")
            records[-1].events.append(parse_event(line[len("event\t") :]))
        else:
            raise ValueError(f"unrecognized log line: {line!r}")
    return records
