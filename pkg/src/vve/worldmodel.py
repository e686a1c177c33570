"""Planar virtual world: ego twin pose plus static rectangular obstacles.

The world is a plain value. The simulation stepper owns it and replaces the
ego pose every tick so the twin tracks the driven vehicle; obstacles never
move. Overlap tests use closed rectangles (boundary contact counts), which
is the conservative choice for a collision metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geoframe import LocalPose


@dataclass(frozen=True)
class ObstacleSpec:
    """Oriented rectangle: center (x, y) meters, heading radians, size meters."""

    id: int
    x: float
    y: float
    heading: float
    length: float  # extent along heading
    width: float

    def __post_init__(self) -> None:
        if not (self.length > 0.0 and self.width > 0.0):
            raise ValueError(f"obstacle {self.id}: length and width must be > 0")


@dataclass(frozen=True)
class EgoFootprint:
    """Ego rectangle relative to the rear-axle reference point.

    The body spans [-rear_overhang, wheelbase + front_overhang] along the
    heading and is centered laterally. Defaults are a sedan-like stand-in.
    """

    wheelbase: float = 2.85
    front_overhang: float = 0.95
    rear_overhang: float = 1.0
    width: float = 1.9

    def __post_init__(self) -> None:
        for name in ("wheelbase", "front_overhang", "rear_overhang", "width"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"ego footprint {name} must be > 0")

    @property
    def length(self) -> float:
        return self.rear_overhang + self.wheelbase + self.front_overhang

    @property
    def center_offset(self) -> float:
        """Distance from the rear-axle reference to the rectangle center."""
        return (self.wheelbase + self.front_overhang - self.rear_overhang) / 2.0


@dataclass(frozen=True)
class World:
    ego_pose: LocalPose
    ego_footprint: EgoFootprint
    obstacles: tuple[ObstacleSpec, ...]

    def __post_init__(self) -> None:
        ids = [o.id for o in self.obstacles]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate obstacle ids: {sorted(ids)}")


def set_ego_pose(world: World, pose: LocalPose) -> World:
    """Return a world with the ego twin moved to ``pose``; obstacles untouched."""
    return replace(world, ego_pose=pose)


def _rect_corners(cx: float, cy: float, heading: float, length: float, width: float) -> list[tuple[float, float]]:
    """Corners of a centered oriented rectangle, counter-clockwise."""
    c, s = math.cos(heading), math.sin(heading)
    hl, hw = length / 2.0, width / 2.0
    body = ((-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw))
    return [(cx + c * bx - s * by, cy + s * bx + c * by) for bx, by in body]


def obstacle_corners(spec: ObstacleSpec) -> list[tuple[float, float]]:
    """Corner points of the obstacle rectangle in the local frame, CCW order."""
    return _rect_corners(spec.x, spec.y, spec.heading, spec.length, spec.width)


def ego_corners(world: World) -> list[tuple[float, float]]:
    """Ego footprint corners at the current twin pose, CCW order."""
    fp = world.ego_footprint
    p = world.ego_pose
    cx = p.x + fp.center_offset * math.cos(p.heading)
    cy = p.y + fp.center_offset * math.sin(p.heading)
    return _rect_corners(cx, cy, p.heading, fp.length, fp.width)


def _project_interval(corners: list[tuple[float, float]], ax: float, ay: float) -> tuple[float, float]:
    dots = [cx * ax + cy * ay for cx, cy in corners]
    return min(dots), max(dots)


def rects_overlap(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> bool:
    """Separating-axis test on two convex quads, closed-set convention."""
    for corners in (a, b):
        for i in range(4):
            x0, y0 = corners[i]
            x1, y1 = corners[(i + 1) % 4]
            # outward normal of the edge; only direction matters
            ax, ay = y1 - y0, x0 - x1
            amin, amax = _project_interval(a, ax, ay)
            bmin, bmax = _project_interval(b, ax, ay)
            if amax < bmin or bmax < amin:
                return False
    return True


def footprints_intersect(world: World) -> bool:
    """True iff the ego footprint overlaps any obstacle rectangle."""
    ego = ego_corners(world)
    return any(rects_overlap(ego, obstacle_corners(o)) for o in world.obstacles)
