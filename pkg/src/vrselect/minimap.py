"""Disc minimap baseline: cone projection, overlap expansion, picking.

Objects inside an aiming cone project orthographically onto a disc, with
the cone cross-section at each object's depth scaled to the disc radius.
Icon clusters that overlap on the disc are expanded onto the circumference
so every object stays individually pickable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .scene import Scene

TWO_PI = 2.0 * math.pi


class CapacityExceeded(RuntimeError):
    """More icons need circumference slots than the arc spacing allows."""


@dataclass(frozen=True)
class MinimapConfig:
    cone_origin: tuple[float, float, float] = (0.0, 1.2, 0.0)
    cone_direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    disc_radius: float = 1.0
    icon_radius: float = 0.04
    cone_half_angle: float = 0.35

    def __post_init__(self) -> None:
        if not 0.0 < self.icon_radius < self.disc_radius:
            raise ValueError("require 0 < icon_radius < disc_radius")
        if not 0.0 < self.cone_half_angle < math.pi / 2:
            raise ValueError("require 0 < cone_half_angle < pi/2")

    def min_ring_gap(self) -> float:
        # Angular gap whose chord equals one icon diameter, padded a hair so
        # respaced ring icons never round back under the separation floor.
        return 2.0 * math.asin(self.icon_radius / self.disc_radius) + 1e-9


@dataclass(frozen=True)
class MinimapIcon:
    object_id: str
    map_position: tuple[float, float]
    expanded: bool = False
    anchor_angle: float = 0.0


@dataclass(frozen=True)
class MinimapLayout:
    icons: tuple[MinimapIcon, ...]
    cfg: MinimapConfig = field(default_factory=MinimapConfig)
    frozen: bool = True

    @property
    def empty(self) -> bool:
        return not self.icons


def _disc_basis(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic 2D basis for the plane perpendicular to the cone axis."""
    up = np.array([0.0, 1.0, 0.0])
    if abs(float(direction @ up)) > 0.99:
        up = np.array([1.0, 0.0, 0.0])
    u = np.cross(up, direction)
    u = u / np.linalg.norm(u)
    v = np.cross(direction, u)
    return u, v


def project(scene: Scene, cfg: MinimapConfig) -> MinimapLayout:
    """Map every in-cone object onto the disc; the layout freezes on creation."""
    origin = np.array(cfg.cone_origin, dtype=float)
    direction = np.array(cfg.cone_direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    u, v = _disc_basis(direction)
    tan_half = math.tan(cfg.cone_half_angle)

    icons: list[MinimapIcon] = []
    for obj in scene.objects:
        rel = np.array(obj.position, dtype=float) - origin
        depth = float(rel @ direction)
        if depth <= 0.0:
            continue
        lateral = rel - depth * direction
        if float(np.linalg.norm(lateral)) > depth * tan_half + 1e-12:
            continue
        scale = cfg.disc_radius / (depth * tan_half)
        icons.append(
            MinimapIcon(
                object_id=obj.id,
                map_position=(float(lateral @ u) * scale, float(lateral @ v) * scale),
            )
        )
    return MinimapLayout(icons=tuple(icons), cfg=cfg, frozen=True)


def _components(positions: list[tuple[float, float]], min_dist: float) -> list[list[int]]:
    """Connected components of the 'closer than min_dist' graph."""
    n = len(positions)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            dx = positions[i][0] - positions[j][0]
            dy = positions[i][1] - positions[j][1]
            if math.hypot(dx, dy) < min_dist:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _space_on_circle(angles: list[float], min_gap: float) -> list[float]:
    """Push angles apart until consecutive gaps reach min_gap, keeping order.

    Falls back to exactly even spacing when the greedy forward sweep cannot
    close the wrap-around gap.
    """
    k = len(angles)
    if k <= 1:
        return list(angles)
    if k * min_gap > TWO_PI + 1e-12:
        raise CapacityExceeded(f"{k} icons cannot fit on the circumference")
    out = list(angles)
    for i in range(1, k):
        if out[i] - out[i - 1] < min_gap:
            out[i] = out[i - 1] + min_gap
    if (out[0] + TWO_PI) - out[-1] < min_gap - 1e-12:
        even = TWO_PI / k
        out = [out[0] + i * even for i in range(k)]
    return out


def expand_overlaps(layout: MinimapLayout, cfg: MinimapConfig) -> MinimapLayout:
    """Expand every overlapping cluster onto the circumference.

    A cluster of k icons divides the circle into k equal steps centered on
    the cluster's centroid angle (two coincident icons end up opposite each
    other), keeping the members' own angular order. The pass repeats until
    no pair sits closer than an icon diameter, so an interior icon that a
    relocated cluster lands on gets expanded on the next round. All icons
    on the ring are respaced together whenever a round moves anything.
    """
    if not layout.frozen:
        raise ValueError("layout must be frozen before expansion")
    icons = list(layout.icons)
    min_dist = 2.0 * cfg.icon_radius
    min_gap = cfg.min_ring_gap()

    for _ in range(len(icons) + 2):
        positions = [ic.map_position for ic in icons]
        comps = _components(positions, min_dist)
        if all(len(c) == 1 for c in comps):
            return MinimapLayout(icons=tuple(icons), cfg=cfg, frozen=True)

        desired: dict[int, float] = {}
        for comp in comps:
            if len(comp) == 1:
                i = comp[0]
                if icons[i].expanded:
                    # Already on the ring; keep its slot in the respacing.
                    x, y = icons[i].map_position
                    desired[i] = math.atan2(y, x)
                continue
            cx = sum(icons[i].map_position[0] for i in comp) / len(comp)
            cy = sum(icons[i].map_position[1] for i in comp) / len(comp)
            centroid_angle = math.atan2(cy, cx)
            unwrapped: dict[int, float] = {}
            for i in comp:
                x, y = icons[i].map_position
                a = math.atan2(y, x) if (x, y) != (0.0, 0.0) else centroid_angle
                while a <= centroid_angle - math.pi:
                    a += TWO_PI
                while a > centroid_angle + math.pi:
                    a -= TWO_PI
                unwrapped[i] = a
            ordered = sorted(comp, key=lambda i: (unwrapped[i], icons[i].object_id))
            k = len(ordered)
            step = TWO_PI / k
            for slot, i in enumerate(ordered):
                desired[i] = centroid_angle + (slot - (k - 1) / 2.0) * step

        ring = sorted(desired, key=lambda i: (desired[i] % TWO_PI, icons[i].object_id))
        spaced = _space_on_circle([desired[i] % TWO_PI for i in ring], min_gap)
        for i, angle in zip(ring, spaced):
            wrapped = angle % TWO_PI
            icons[i] = replace(
                icons[i],
                map_position=(
                    cfg.disc_radius * math.cos(wrapped),
                    cfg.disc_radius * math.sin(wrapped),
                ),
                expanded=True,
                anchor_angle=wrapped,
            )

    raise CapacityExceeded("expansion failed to converge")


def pick_from_minimap(layout: MinimapLayout, point: tuple[float, float]) -> Optional[str]:
    """Nearest icon within one icon radius of the point, ties to lower id."""
    if not layout.frozen:
        raise ValueError("layout must be frozen before picking")
    best: Optional[tuple[float, str]] = None
    for icon in layout.icons:
        d = math.hypot(point[0] - icon.map_position[0], point[1] - icon.map_position[1])
        if d <= layout.cfg.icon_radius and (best is None or (d, icon.object_id) < best):
            best = (d, icon.object_id)
    return best[1] if best else None


def serialize_layout(layout: MinimapLayout) -> str:
    """Line-oriented text form, same style as scene serialization."""
    lines = [f"minimap {len(layout.icons)} {1 if layout.frozen else 0}"]
    for icon in layout.icons:
        lines.append(
            "%s %.6f %.6f %d %.6f"
            % (
                icon.object_id,
                icon.map_position[0],
                icon.map_position[1],
                1 if icon.expanded else 0,
                icon.anchor_angle,
            )
        )
    return "\n".join(lines) + "\n"
