"""Procedural search scenes and their spatial queries.

A scene is a fixed box of 120 distractor objects plus 1, 2, or 4 target
objects that all share one (shape, color) pair no distractor may use.
Which shapes and colors are available depends on the difficulty level:
each level owns a palette of four shapes and four colors.

Generation is fully deterministic for a given (level, num_targets, seed,
target_override) tuple, and distractor identity (shape, color, position,
orientation) depends on (level, seed) alone so the same seed reuses one
distractor arrangement across different target counts.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np


class ShapeKind(Enum):
    CUBE = "cube"
    SPHERE = "sphere"
    CYLINDER = "cylinder"
    PYRAMID = "pyramid"
    PYRAMID_CUBOID = "pyramid_cuboid"
    BARREL = "barrel"
    TRUNCATED_CYLINDER = "truncated_cylinder"
    CROSS = "cross"

    @property
    def phrase(self) -> str:
        """Spoken surface form, e.g. 'pyramid cuboid'."""
        return self.value.replace("_", " ")


class ColorKind(Enum):
    GREEN = "green"
    PURPLE = "purple"
    BLUE = "blue"
    RED = "red"
    WHITE_PATTERN = "white_pattern"
    PURPLE_PATTERN = "purple_pattern"
    BLUE_PATTERN = "blue_pattern"
    YELLOW_PATTERN = "yellow_pattern"

    @property
    def phrase(self) -> str:
        return self.value.replace("_", " ")


class PerplexityLevel(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


# Search volume: x is width (centered), y is height, z is depth away from
# the user. The viewpoint sits at standing eye height on the front face.
SEARCH_WIDTH = 10.0
SEARCH_HEIGHT = 5.0
SEARCH_DEPTH = 20.0
VIEWPOINT = (0.0, 1.6, 0.0)

# One bounding radius for every shape keeps picking and spacing uniform.
BOUNDING_RADIUS = 0.25

DISTRACTOR_COUNT = 120
VALID_TARGET_COUNTS = (1, 2, 4)

SEARCH_REGION_PADDING = 1.0

MAX_PLACEMENT_ATTEMPTS = 10_000

_PALETTES: dict[PerplexityLevel, tuple[tuple[ShapeKind, ...], tuple[ColorKind, ...]]] = {
    PerplexityLevel.LOW: (
        (ShapeKind.CUBE, ShapeKind.SPHERE, ShapeKind.CYLINDER, ShapeKind.PYRAMID),
        (ColorKind.PURPLE, ColorKind.BLUE, ColorKind.GREEN, ColorKind.RED),
    ),
    PerplexityLevel.MEDIUM: (
        (ShapeKind.CUBE, ShapeKind.SPHERE, ShapeKind.BARREL, ShapeKind.PYRAMID_CUBOID),
        (ColorKind.PURPLE, ColorKind.BLUE, ColorKind.PURPLE_PATTERN, ColorKind.WHITE_PATTERN),
    ),
    PerplexityLevel.HIGH: (
        (ShapeKind.BARREL, ShapeKind.CROSS, ShapeKind.PYRAMID_CUBOID, ShapeKind.TRUNCATED_CYLINDER),
        (ColorKind.PURPLE_PATTERN, ColorKind.WHITE_PATTERN, ColorKind.YELLOW_PATTERN, ColorKind.BLUE_PATTERN),
    ),
}


class GenerationOverflow(RuntimeError):
    """Rejection sampling could not place an object; density is impossible."""


def palette_for(level: PerplexityLevel) -> tuple[tuple[ShapeKind, ...], tuple[ColorKind, ...]]:
    """Return the (shapes, colors) palette of a difficulty level."""
    return _PALETTES[level]


def palette_pairs(level: PerplexityLevel) -> list[tuple[ShapeKind, ColorKind]]:
    """All 16 (shape, color) pairs of a level, in palette order."""
    shapes, colors = _PALETTES[level]
    return [(s, c) for s in shapes for c in colors]


@dataclass(frozen=True)
class SceneObject:
    id: str
    shape: ShapeKind
    color: ColorKind
    position: tuple[float, float, float]
    orientation: tuple[float, float, float]  # yaw, pitch, roll in radians
    bounding_radius: float = BOUNDING_RADIUS
    is_target: bool = False


@dataclass
class Scene:
    perplexity: PerplexityLevel
    objects: list[SceneObject]
    num_targets: int
    seed: int
    search_region_center: tuple[float, float, float]
    search_region_radius: float

    def targets(self) -> list[SceneObject]:
        return [o for o in self.objects if o.is_target]

    def distractors(self) -> list[SceneObject]:
        return [o for o in self.objects if not o.is_target]

    def target_pair(self) -> tuple[ShapeKind, ColorKind]:
        first = self.targets()[0]
        return (first.shape, first.color)

    def object_by_id(self, object_id: str) -> SceneObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(object_id)

    def centers(self) -> np.ndarray:
        return np.array([o.position for o in self.objects], dtype=float)

    def radii(self) -> np.ndarray:
        return np.array([o.bounding_radius for o in self.objects], dtype=float)


@dataclass(frozen=True)
class Ray:
    origin: tuple[float, float, float]
    direction: tuple[float, float, float]

    def __post_init__(self) -> None:
        norm = math.sqrt(sum(c * c for c in self.direction))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"ray direction must be unit length, |d|={norm!r}")

    @classmethod
    def aimed(cls, origin: Iterable[float], at: Iterable[float]) -> "Ray":
        """Ray from origin through the point ``at`` (direction normalized)."""
        o = tuple(float(v) for v in origin)
        a = tuple(float(v) for v in at)
        d = tuple(ai - oi for ai, oi in zip(a, o))
        norm = math.sqrt(sum(c * c for c in d))
        if norm == 0.0:
            raise ValueError("ray target coincides with origin")
        return cls(o, tuple(c / norm for c in d))


@dataclass(frozen=True)
class PickHit:
    object_id: str
    distance: float


@dataclass(frozen=True)
class PickResult:
    hit: Optional[PickHit] = None


def _sample_position(rng: random.Random, placed: list[np.ndarray], radius: float) -> np.ndarray:
    """Draw a center at least (2 * radius) from every placed center.

    Centers are inset by the bounding radius so objects sit fully inside
    the search box.
    """
    lo_x, hi_x = -SEARCH_WIDTH / 2 + radius, SEARCH_WIDTH / 2 - radius
    lo_y, hi_y = radius, SEARCH_HEIGHT - radius
    lo_z, hi_z = radius, SEARCH_DEPTH - radius
    stack = np.array(placed, dtype=float) if placed else None
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        p = np.array(
            [rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y), rng.uniform(lo_z, hi_z)]
        )
        if stack is None:
            return p
        d2 = np.sum((stack - p) ** 2, axis=1)
        if np.all(d2 >= (2.0 * radius) ** 2):
            return p
    raise GenerationOverflow(
        f"failed to place an object after {MAX_PLACEMENT_ATTEMPTS} attempts"
    )


def _sample_orientation(rng: random.Random) -> tuple[float, float, float]:
    return (
        rng.uniform(0.0, 2.0 * math.pi),
        rng.uniform(0.0, 2.0 * math.pi),
        rng.uniform(0.0, 2.0 * math.pi),
    )


def _min_enclosing_sphere(points: list[tuple[float, float, float]]) -> tuple[np.ndarray, float]:
    """Smallest sphere containing all points, exact for the <= 4 points used here.

    Tries every support subset (pairs, triples, the full quad) and keeps the
    smallest candidate sphere that contains everything.
    """
    pts = np.array(points, dtype=float)
    if len(pts) == 1:
        return pts[0], 0.0

    def contains_all(center: np.ndarray, radius: float) -> bool:
        d = np.sqrt(np.sum((pts - center) ** 2, axis=1))
        return bool(np.all(d <= radius + 1e-9))

    best: tuple[np.ndarray, float] | None = None

    def consider(center: np.ndarray, radius: float) -> None:
        nonlocal best
        if contains_all(center, radius) and (best is None or radius < best[1]):
            best = (center, radius)

    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            c = (pts[i] + pts[j]) / 2.0
            consider(c, float(np.linalg.norm(pts[i] - c)))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b = pts[j] - pts[i], pts[k] - pts[i]
                # Circumcenter of the triangle, solved in its own plane.
                g = np.array([[a @ a, a @ b], [a @ b, b @ b]], dtype=float)
                rhs = np.array([(a @ a) / 2.0, (b @ b) / 2.0])
                try:
                    uv = np.linalg.solve(g, rhs)
                except np.linalg.LinAlgError:
                    continue
                c = pts[i] + uv[0] * a + uv[1] * b
                consider(c, float(np.linalg.norm(pts[i] - c)))
    if n == 4:
        m = 2.0 * (pts[1:] - pts[0])
        rhs = np.sum(pts[1:] ** 2, axis=1) - np.sum(pts[0] ** 2)
        if abs(np.linalg.det(m)) > 1e-12:
            c = np.linalg.solve(m, rhs)
            consider(c, float(np.linalg.norm(pts[0] - c)))

    assert best is not None, "degenerate target layout"
    return best


def generate_scene(
    level: PerplexityLevel,
    num_targets: int,
    seed: int,
    target_override: Optional[tuple[ShapeKind, ColorKind]] = None,
) -> Scene:
    """Build the deterministic scene for (level, num_targets, seed).

    Distractor identity is a function of (level, seed) only: the stream that
    drives distractor pair indices, placements, and orientations never sees
    the target pair or the target count. The target pair indexes into the
    15 leftover palette pairs, so overriding the target remaps distractor
    materials without moving anything.
    """
    if num_targets not in VALID_TARGET_COUNTS:
        raise ValueError(f"num_targets must be one of {VALID_TARGET_COUNTS}")
    pairs = palette_pairs(level)
    if target_override is not None and target_override not in pairs:
        raise ValueError(f"target override {target_override} not in {level.value} palette")

    rng_pair = random.Random(f"pair:{level.value}:{seed}")
    target_pair = target_override or pairs[rng_pair.randrange(len(pairs))]
    remaining = [p for p in pairs if p != target_pair]

    rng_d = random.Random(f"distractors:{level.value}:{seed}")
    objects: list[SceneObject] = []
    placed: list[np.ndarray] = []
    for i in range(DISTRACTOR_COUNT):
        shape, color = remaining[rng_d.randrange(len(remaining))]
        pos = _sample_position(rng_d, placed, BOUNDING_RADIUS)
        placed.append(pos)
        objects.append(
            SceneObject(
                id=f"d{i:03d}",
                shape=shape,
                color=color,
                position=tuple(float(v) for v in pos),
                orientation=_sample_orientation(rng_d),
            )
        )

    shape_tok, color_tok = target_pair[0].value, target_pair[1].value
    rng_t = random.Random(
        f"targets:{level.value}:{seed}:{num_targets}:{shape_tok}:{color_tok}"
    )
    target_positions: list[tuple[float, float, float]] = []
    for i in range(num_targets):
        pos = _sample_position(rng_t, placed, BOUNDING_RADIUS)
        placed.append(pos)
        position = tuple(float(v) for v in pos)
        target_positions.append(position)
        objects.append(
            SceneObject(
                id=f"t{i}",
                shape=target_pair[0],
                color=target_pair[1],
                position=position,
                orientation=_sample_orientation(rng_t),
                is_target=True,
            )
        )

    center, radius = _min_enclosing_sphere(target_positions)
    return Scene(
        perplexity=level,
        objects=objects,
        num_targets=num_targets,
        seed=seed,
        search_region_center=tuple(float(v) for v in center),
        search_region_radius=float(radius) + SEARCH_REGION_PADDING,
    )


@functools.lru_cache(maxsize=256)
def generate_scene_cached(
    level: PerplexityLevel,
    num_targets: int,
    seed: int,
    target_override: Optional[tuple[ShapeKind, ColorKind]] = None,
) -> Scene:
    """Memoized :func:`generate_scene`; treat the returned scene as read-only."""
    return generate_scene(level, num_targets, seed, target_override)


def raycast(scene: Scene, ray: Ray) -> PickResult:
    """Nearest bounding-sphere hit with strictly positive distance.

    A ray starting inside a sphere reports that sphere at its exit distance.
    """
    if not scene.objects:
        return PickResult()
    centers = scene.centers()
    radii = scene.radii()
    o = np.array(ray.origin, dtype=float)
    d = np.array(ray.direction, dtype=float)

    oc = o - centers
    b = oc @ d
    c = np.sum(oc * oc, axis=1) - radii**2
    disc = b * b - c
    hit_mask = disc >= 0.0
    sq = np.sqrt(np.where(hit_mask, disc, 0.0))
    t_enter = -b - sq
    t_exit = -b + sq
    t = np.where(t_enter > 0.0, t_enter, t_exit)
    valid = hit_mask & (t > 0.0)
    if not np.any(valid):
        return PickResult()
    t = np.where(valid, t, np.inf)
    idx = int(np.argmin(t))
    return PickResult(hit=PickHit(scene.objects[idx].id, float(t[idx])))


def occluded_set(scene: Scene, viewpoint: tuple[float, float, float] = VIEWPOINT) -> set[str]:
    """Ids whose line of sight from the viewpoint crosses another object first.

    An object counts as occluded when the segment from the viewpoint to its
    center enters some other bounding sphere strictly between the two ends.
    The viewpoint must lie outside every bounding sphere.
    """
    centers = scene.centers()
    radii = scene.radii()
    vp = np.array(viewpoint, dtype=float)
    out: set[str] = set()
    for i, obj in enumerate(scene.objects):
        v = centers[i] - vp
        dist = float(np.linalg.norm(v))
        u = v / dist
        oc = vp - centers
        b = oc @ u
        c = np.sum(oc * oc, axis=1) - radii**2
        disc = b * b - c
        mask = disc >= 0.0
        t_enter = -b - np.sqrt(np.where(mask, disc, 0.0))
        blocking = mask & (t_enter > 0.0) & (t_enter < dist)
        blocking[i] = False
        if np.any(blocking):
            out.add(obj.id)
    return out


def serialize_scene(scene: Scene) -> str:
    """Line-oriented text form; identical scenes serialize to identical bytes."""
    lines = [f"scene {scene.perplexity.value} {scene.num_targets} {scene.seed}"]
    for o in scene.objects:
        reals = " ".join("%.6f" % v for v in (*o.position, *o.orientation))
        lines.append(
            f"{o.id} {o.shape.value} {o.color.value} {reals} {1 if o.is_target else 0}"
        )
    return "\n".join(lines) + "\n"


def parse_scene(text: str) -> Scene:
    """Inverse of :func:`serialize_scene` (search region is recomputed)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "scene" or len(head) != 4:
        raise ValueError(f"bad scene header: {lines[0]!r}")
    level = PerplexityLevel(head[1])
    num_targets = int(head[2])
    seed = int(head[3])
    objects: list[SceneObject] = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 10:
            raise ValueError(f"bad scene object line: {ln!r}")
        objects.append(
            SceneObject(
                id=parts[0],
                shape=ShapeKind(parts[1]),
                color=ColorKind(parts[2]),
                position=(float(parts[3]), float(parts[4]), float(parts[5])),
                orientation=(float(parts[6]), float(parts[7]), float(parts[8])),
                is_target=parts[9] == "1",
            )
        )
    target_positions = [o.position for o in objects if o.is_target]
    center, radius = _min_enclosing_sphere(target_positions)
    return Scene(
        perplexity=level,
        objects=objects,
        num_targets=num_targets,
        seed=seed,
        search_region_center=tuple(float(v) for v in center),
        search_region_radius=float(radius) + SEARCH_REGION_PADDING,
    )
