"""Minimap projection, overlap expansion, and picking."""

from __future__ import annotations

import math
import random

import pytest

from vrselect.minimap import (
    CapacityExceeded,
    MinimapConfig,
    MinimapIcon,
    MinimapLayout,
    expand_overlaps,
    pick_from_minimap,
    project,
    serialize_layout,
)
from vrselect.scene import PerplexityLevel, generate_scene


def _layout(positions, cfg=None, ids=None):
    cfg = cfg or MinimapConfig()
    icons = tuple(
        MinimapIcon(object_id=(ids[i] if ids else f"o{i:03d}"), map_position=p)
        for i, p in enumerate(positions)
    )
    return MinimapLayout(icons=icons, cfg=cfg, frozen=True)


def oracle_in_cone(scene, cfg):
    origin = cfg.cone_origin
    d = cfg.cone_direction
    norm = math.sqrt(sum(c * c for c in d))
    d = tuple(c / norm for c in d)
    out = set()
    for o in scene.objects:
        rel = tuple(p - q for p, q in zip(o.position, origin))
        depth = sum(r * di for r, di in zip(rel, d))
        if depth <= 0:
            continue
        lateral = math.sqrt(max(0.0, sum(r * r for r in rel) - depth * depth))
        if math.atan2(lateral, depth) <= cfg.cone_half_angle + 1e-12:
            out.add(o.id)
    return out


# -- projection ---------------------------------------------------------------

def test_object_on_axis_projects_to_center():
    scene = generate_scene(PerplexityLevel.LOW, 1, seed=2)
    target = scene.targets()[0]
    d = tuple(p - q for p, q in zip(target.position, MinimapConfig().cone_origin))
    norm = math.sqrt(sum(c * c for c in d))
    cfg = MinimapConfig(cone_direction=tuple(c / norm for c in d))
    layout = project(scene, cfg)
    icon = next(ic for ic in layout.icons if ic.object_id == target.id)
    assert icon.map_position == pytest.approx((0.0, 0.0), abs=1e-9)
    assert layout.frozen


def test_empty_cone_yields_empty_layout():
    scene = generate_scene(PerplexityLevel.LOW, 1, seed=2)
    cfg = MinimapConfig(cone_direction=(0.0, 0.0, -1.0))  # aims away from the box
    layout = project(scene, cfg)
    assert layout.empty
    assert layout.icons == ()


def test_projection_membership_matches_cone_oracle():
    rng = random.Random(8)
    for _ in range(10):
        scene = generate_scene(
            rng.choice(list(PerplexityLevel)), rng.choice((1, 2, 4)), seed=rng.randrange(1 << 16)
        )
        raw = (rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3), 1.0)
        norm = math.sqrt(sum(c * c for c in raw))
        cfg = MinimapConfig(
            cone_direction=tuple(c / norm for c in raw),
            cone_half_angle=rng.uniform(0.1, 0.6),
        )
        layout = project(scene, cfg)
        assert {ic.object_id for ic in layout.icons} == oracle_in_cone(scene, cfg)


def test_projection_containment():
    scene = generate_scene(PerplexityLevel.MEDIUM, 4, seed=5)
    cfg = MinimapConfig()
    layout = project(scene, cfg)
    assert layout.icons
    for icon in layout.icons:
        assert math.hypot(*icon.map_position) <= cfg.disc_radius + 1e-9


# -- expansion ----------------------------------------------------------------

def test_no_overlap_is_identity():
    cfg = MinimapConfig()
    layout = _layout([(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)], cfg)
    expanded = expand_overlaps(layout, cfg)
    assert expanded.icons == layout.icons


def test_two_coincident_icons_expand_opposite():
    cfg = MinimapConfig()
    layout = _layout([(0.3, 0.4), (0.3, 0.4)], cfg)
    expanded = expand_overlaps(layout, cfg)
    assert all(ic.expanded for ic in expanded.icons)
    for icon in expanded.icons:
        assert math.hypot(*icon.map_position) == pytest.approx(cfg.disc_radius, abs=1e-9)
    a, b = expanded.icons
    gap = abs(a.anchor_angle - b.anchor_angle) % (2 * math.pi)
    gap = min(gap, 2 * math.pi - gap)
    assert gap == pytest.approx(math.pi, abs=1e-9)
    d = math.dist(a.map_position, b.map_position)
    assert d >= 2 * cfg.icon_radius


def test_expansion_preserves_membership_and_separation():
    rng = random.Random(31)
    cfg = MinimapConfig()
    for _ in range(100):
        positions = []
        for _ in range(rng.randrange(1, 5)):  # a few clusters
            cx, cy = rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)
            for _ in range(rng.randrange(1, 6)):
                positions.append(
                    (cx + rng.gauss(0, 0.02), cy + rng.gauss(0, 0.02))
                )
        layout = _layout(positions, cfg)
        expanded = expand_overlaps(layout, cfg)
        assert {ic.object_id for ic in expanded.icons} == {ic.object_id for ic in layout.icons}
        icons = expanded.icons
        for i in range(len(icons)):
            for j in range(i + 1, len(icons)):
                assert math.dist(icons[i].map_position, icons[j].map_position) >= 2 * cfg.icon_radius
        for icon in icons:
            if icon.expanded:
                assert math.hypot(*icon.map_position) == pytest.approx(cfg.disc_radius, abs=1e-9)


def test_expansion_pulls_in_collided_interior_icon():
    cfg = MinimapConfig()
    # Icon parked on the rim where a coincident pair will land.
    rim = (cfg.disc_radius, 0.0)
    layout = _layout([(0.9, 0.0), (0.9, 0.0), rim], cfg)
    expanded = expand_overlaps(layout, cfg)
    icons = expanded.icons
    for i in range(len(icons)):
        for j in range(i + 1, len(icons)):
            assert math.dist(icons[i].map_position, icons[j].map_position) >= 2 * cfg.icon_radius


def test_capacity_exceeded():
    cfg = MinimapConfig(icon_radius=0.3)  # ring fits at most 10 icons
    positions = [(0.01 * i, 0.0) for i in range(12)]
    with pytest.raises(CapacityExceeded):
        expand_overlaps(_layout(positions, cfg), cfg)


def test_expansion_requires_frozen_layout():
    cfg = MinimapConfig()
    layout = MinimapLayout(icons=(), cfg=cfg, frozen=False)
    with pytest.raises(ValueError):
        expand_overlaps(layout, cfg)


# -- picking ------------------------------------------------------------------

def test_pick_on_icon_center():
    layout = _layout([(0.1, 0.2), (-0.4, 0.0)])
    assert pick_from_minimap(layout, (0.1, 0.2)) == "o000"


def test_pick_nearest_of_two():
    cfg = MinimapConfig(icon_radius=0.2)
    layout = _layout([(0.0, 0.0), (0.3, 0.0)], cfg)
    # Nearer to the first icon; brute force: d0=0.1, d1=0.2.
    assert pick_from_minimap(layout, (0.1, 0.0)) == "o000"
    assert pick_from_minimap(layout, (0.2, 0.0)) == "o001"
    # Exact tie at 0.15: lower object id wins.
    assert pick_from_minimap(layout, (0.15, 0.0)) == "o000"


def test_pick_outside_all_icons():
    layout = _layout([(0.0, 0.0)])
    assert pick_from_minimap(layout, (0.5, 0.5)) is None


def test_every_icon_pickable_after_expansion():
    rng = random.Random(13)
    cfg = MinimapConfig()
    for _ in range(50):
        positions = [
            (rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)) for _ in range(rng.randrange(2, 12))
        ]
        expanded = expand_overlaps(_layout(positions, cfg), cfg)
        for icon in expanded.icons:
            assert pick_from_minimap(expanded, icon.map_position) == icon.object_id


def test_serialize_layout_shape():
    cfg = MinimapConfig()
    expanded = expand_overlaps(_layout([(0.1, 0.1), (0.1, 0.1)], cfg), cfg)
    lines = serialize_layout(expanded).splitlines()
    assert lines[0] == "minimap 2 1"
    assert all(len(line.split()) == 5 for line in lines[1:])
