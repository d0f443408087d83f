"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line
per criterion. Each test enforces its stated runtime budget.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from contextlib import contextmanager

import pytest

from vrselect.harness import (
    Outcome,
    Technique,
    TrialPhaseKind,
    build_plan,
    filter_outliers,
    serialize_records,
)
from vrselect.minimap import MinimapConfig, MinimapIcon, MinimapLayout, expand_overlaps, pick_from_minimap
from vrselect.nlu import Intent, default_lexicon, interpret
from vrselect.replay import build_auto_script, replay_script
from vrselect.scene import (
    ColorKind,
    PerplexityLevel,
    Ray,
    ShapeKind,
    generate_scene,
    occluded_set,
    palette_for,
    raycast,
    serialize_scene,
)
from vrselect.selection import SelectionState, apply_speech

from test_scene import oracle_nearest_hit, oracle_occluded

LEX = default_lexicon()


@contextmanager
def criterion(name: str, budget_s: float | None = None):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    elapsed = time.perf_counter() - t0
    if budget_s is not None and elapsed >= budget_s:
        print(f"\nACCEPTANCE {name}: FAIL (runtime {elapsed:.2f}s over {budget_s}s budget)")
        raise AssertionError(f"{name} exceeded runtime budget: {elapsed:.2f}s >= {budget_s}s")
    print(f"\nACCEPTANCE {name}: PASS ({elapsed:.2f}s)")


@pytest.fixture(scope="module")
def full_replay():
    plan = build_plan("P00", 0)
    script = build_auto_script(plan)
    records = replay_script(script, plan)
    return plan, script, records


def test_grammar_fidelity():
    with criterion("grammar-fidelity", budget_s=1.0):
        verbs = sorted(LEX.select_verbs)
        determiners = ["", "the", "all"]
        colors: set[ColorKind] = set()
        shapes: set[ShapeKind] = set()
        for level in PerplexityLevel:
            level_shapes, level_colors = palette_for(level)
            shapes.update(level_shapes)
            colors.update(level_colors)
        phrases: list[tuple[str, ColorKind | None, ShapeKind | None]] = []
        for color in sorted(colors, key=lambda c: c.value):
            phrases.append((color.phrase, color, None))
        for shape in sorted(shapes, key=lambda s: s.value):
            phrases.append((shape.phrase, None, shape))
        for color in sorted(colors, key=lambda c: c.value):
            for shape in sorted(shapes, key=lambda s: s.value):
                phrases.append((f"{color.phrase} {shape.phrase}", color, shape))
        corpus = [
            (" ".join(p for p in (verb, det, phrase) if p), color, shape)
            for verb, det, (phrase, color, shape) in itertools.product(
                verbs, determiners, phrases
            )
        ]
        assert len(corpus) >= 500
        for utterance, color, shape in corpus:
            cmd = interpret(utterance, LEX)
            assert cmd.intent.intent is Intent.SELECT, utterance
            assert cmd.color() is color, utterance
            assert cmd.shape() is shape, utterance

        fig3 = interpret("Select all purple spheres", LEX)
        assert fig3.intent.intent is Intent.SELECT
        assert fig3.color() is ColorKind.PURPLE and fig3.shape() is ShapeKind.SPHERE
        basic = interpret("Select the purple cube", LEX)
        assert basic.intent.intent is Intent.SELECT
        assert basic.color() is ColorKind.PURPLE and basic.shape() is ShapeKind.CUBE

        out_of_grammar = [
            "what time is it", "open the window please", "turn left", "hello there",
            "play some music", "how far is the moon", "this is a sentence", "purple cube",
            "all spheres", "the blue pattern barrel", "walk forward", "stop",
            "make it bigger", "rotate the view", "zoom in now", "read me the news",
            "is anyone there", "thank you very much", "never mind", "that one",
            "over there", "to the left", "behind you", "underneath the table",
            "good morning", "good night", "see you later", "what can you do",
            "help me out", "show the menu", "hide the panel", "save my progress",
            "load the level", "restart the game", "turn up the volume", "mute it",
            "brighter please", "darker please", "faster", "slower",
            "jump", "crouch", "run away", "come back",
            "where am i", "who are you", "count to ten", "sing a song",
            "tell a joke", "flip a coin",
        ]
        assert len(out_of_grammar) == 50
        for utterance in out_of_grammar:
            cmd = interpret(utterance, LEX)
            assert cmd.intent.intent is Intent.NONE, utterance
            assert cmd.entities == ()


def test_resolution_oracle():
    with criterion("resolution-oracle", budget_s=5.0):
        rng = random.Random(1234)
        cases = 0
        while cases < 1000:
            level = rng.choice(list(PerplexityLevel))
            scene = generate_scene(level, rng.choice((1, 2, 4)), rng.randrange(1 << 24))
            level_shapes, level_colors = palette_for(level)
            state = SelectionState()
            expected: set[str] = set()
            clock = 0
            for _ in range(20):
                clock += 1
                roll = rng.random()
                if roll < 0.1:
                    cmd = interpret("deselect all", LEX)
                    expected = set()
                elif roll < 0.2:
                    cmd = interpret("mumble grumble", LEX)
                else:
                    color = rng.choice((None, *level_colors))
                    shape = rng.choice((None, *level_shapes))
                    if color is None and shape is None:
                        color = rng.choice(level_colors)
                    mention = " ".join(p.phrase for p in (color, shape) if p is not None)
                    cmd = interpret(f"select the {mention}", LEX)
                    expected |= {
                        o.id
                        for o in scene.objects
                        if (color is None or o.color is color)
                        and (shape is None or o.shape is shape)
                    }
                apply_speech(scene, state, cmd, clock)
                assert state.selected == expected
                cases += 1
        assert cases == 1000


def test_scene_structure():
    with criterion("scene-structure", budget_s=10.0):
        rng = random.Random(77)
        for _ in range(100):
            level = rng.choice(list(PerplexityLevel))
            n = rng.choice((1, 2, 4))
            seed = rng.randrange(1 << 32)
            scene = generate_scene(level, n, seed)
            assert len(scene.objects) == 120 + n
            assert len(scene.objects) in (121, 122, 124)
            level_shapes, level_colors = palette_for(level)
            pair = scene.target_pair()
            matching = set()
            for o in scene.objects:
                x, y, z = o.position
                assert -5.0 < x < 5.0 and 0.0 < y < 5.0 and 0.0 < z < 20.0
                assert o.shape in level_shapes and o.color in level_colors
                if (o.shape, o.color) == pair:
                    matching.add(o.id)
            assert matching == {o.id for o in scene.targets()}
            other_n = rng.choice([m for m in (1, 2, 4) if m != n])
            lines = serialize_scene(scene).splitlines()
            other_lines = serialize_scene(generate_scene(level, other_n, seed)).splitlines()
            assert lines[1:121] == other_lines[1:121]


def test_palette_exactness():
    with criterion("palette-exactness"):
        assert palette_for(PerplexityLevel.LOW) == (
            (ShapeKind.CUBE, ShapeKind.SPHERE, ShapeKind.CYLINDER, ShapeKind.PYRAMID),
            (ColorKind.PURPLE, ColorKind.BLUE, ColorKind.GREEN, ColorKind.RED),
        )
        assert palette_for(PerplexityLevel.MEDIUM) == (
            (ShapeKind.CUBE, ShapeKind.SPHERE, ShapeKind.BARREL, ShapeKind.PYRAMID_CUBOID),
            (ColorKind.PURPLE, ColorKind.BLUE, ColorKind.PURPLE_PATTERN, ColorKind.WHITE_PATTERN),
        )
        assert palette_for(PerplexityLevel.HIGH) == (
            (
                ShapeKind.BARREL,
                ShapeKind.CROSS,
                ShapeKind.PYRAMID_CUBOID,
                ShapeKind.TRUNCATED_CYLINDER,
            ),
            (
                ColorKind.PURPLE_PATTERN,
                ColorKind.WHITE_PATTERN,
                ColorKind.YELLOW_PATTERN,
                ColorKind.BLUE_PATTERN,
            ),
        )


def test_raycast_and_occlusion_oracles():
    with criterion("raycast-occlusion-oracles", budget_s=10.0):
        rng = random.Random(4242)
        scenes = [
            generate_scene(
                rng.choice(list(PerplexityLevel)), rng.choice((1, 2, 4)), rng.randrange(1 << 24)
            )
            for _ in range(20)
        ]
        rays_done = 0
        for scene in scenes:
            for _ in range(50):
                origin = (rng.uniform(-7, 7), rng.uniform(-2, 7), rng.uniform(-3, 23))
                raw = (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
                norm = math.sqrt(sum(c * c for c in raw))
                if norm < 1e-9:
                    raw, norm = (0.0, 0.0, 1.0), 1.0
                ray = Ray(origin, tuple(c / norm for c in raw))
                got = raycast(scene, ray).hit
                expected = oracle_nearest_hit(scene, ray)
                if expected is None:
                    assert got is None
                else:
                    assert got is not None
                    assert got.object_id == expected[0]
                    assert abs(got.distance - expected[1]) < 1e-9
                rays_done += 1
            viewpoint = (0.0, 1.6, 0.0)
            assert occluded_set(scene, viewpoint) == oracle_occluded(scene, viewpoint)
        assert rays_done == 1000


def test_minimap_invariants():
    with criterion("minimap-invariants", budget_s=5.0):
        rng = random.Random(31337)
        cfg = MinimapConfig()
        for _ in range(200):
            positions: list[tuple[float, float]] = []
            for _ in range(rng.randrange(1, 6)):
                cx, cy = rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)
                for _ in range(rng.randrange(1, 7)):
                    positions.append((cx + rng.gauss(0, 0.03), cy + rng.gauss(0, 0.03)))
            icons = tuple(
                MinimapIcon(object_id=f"o{i:03d}", map_position=p)
                for i, p in enumerate(positions)
            )
            layout = MinimapLayout(icons=icons, cfg=cfg, frozen=True)
            expanded = expand_overlaps(layout, cfg)
            assert {ic.object_id for ic in expanded.icons} == {ic.object_id for ic in icons}
            out = expanded.icons
            for i in range(len(out)):
                for j in range(i + 1, len(out)):
                    d = math.dist(out[i].map_position, out[j].map_position)
                    assert d >= 2 * cfg.icon_radius
            for icon in out:
                assert pick_from_minimap(expanded, icon.map_position) == icon.object_id


def test_protocol(full_replay):
    with criterion("protocol", budget_s=30.0):
        plan, script, records = full_replay
        assert len(plan.specs) == 108
        pairs = list(zip(plan.specs[0::2], plan.specs[1::2]))
        assert len(pairs) == 54
        for search, repeat in pairs:
            assert search.phase is TrialPhaseKind.SEARCH
            assert repeat.phase is TrialPhaseKind.REPEAT
            assert search.scene_seed == repeat.scene_seed
            assert search.target_pair == repeat.target_pair

        leaders = [build_plan("PX", i).specs[0].technique for i in range(24)]
        assert leaders.count(Technique.ASSIST_VR) == 12
        assert leaders.count(Technique.DISC_PIM) == 12

        again = replay_script(script, plan)
        assert serialize_records(records) == serialize_records(again)
        assert len(records) == 108
        assert all(r.outcome is Outcome.COMPLETED for r in records)

        total = len(records)
        for i in range(1, 24):
            participant_plan = build_plan(f"P{i:02d}", i)
            participant_records = replay_script(
                build_auto_script(participant_plan), participant_plan
            )
            assert len(participant_records) == 108
            total += len(participant_records)
        assert total == 2592


def test_outlier_filter():
    with criterion("outlier-filter", budget_s=1.0):
        from test_harness import _record, _spec

        rng = random.Random(9)
        base = [_record(_spec(), 10_000 + rng.randrange(-40, 41)) for _ in range(100)]
        injected = _record(_spec(), 10_000_000)
        kept, removed = filter_outliers(base + [injected])
        assert removed == [injected]
        assert len(kept) == 100

        same = [_record(_spec(), 8_000) for _ in range(30)]
        kept, removed = filter_outliers(same)
        assert len(kept) == 30 and removed == []

        mixed = []
        for n in (1, 2, 4):
            for _ in range(40):
                mixed.append(_record(_spec(n=n), rng.randrange(5_000, 50_000)))
        kept, removed = filter_outliers(mixed)
        assert len(kept) + len(removed) == len(mixed)


def test_repeat_fidelity(full_replay):
    with criterion("repeat-fidelity"):
        _, _, records = full_replay
        repeat_pairs = list(zip(records[0::2], records[1::2]))
        assert len(repeat_pairs) == 54
        for search, repeat in repeat_pairs:
            assert search.spec.phase is TrialPhaseKind.SEARCH
            assert repeat.spec.phase is TrialPhaseKind.REPEAT
            assert search.scene_text
            assert search.scene_text == repeat.scene_text
            assert search.scene_sha256 == repeat.scene_sha256
