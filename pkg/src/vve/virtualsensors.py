"""Virtual GPS and virtual radar sampled from the world state.

The radar is a deterministic ray caster: rays fan across the field of view,
each ray takes the nearest rectangle-edge hit, and hits are clustered to one
detection per obstacle (the minimum-range hit), mimicking an automotive
radar track list rather than raw returns. The GPS adds zero-mean Gaussian
noise in the local frame before converting back to degrees; sigma defaults
to the centimeter level of an RTK-corrected receiver.

Randomness comes from a caller-owned numpy Generator (PCG64 unless the
caller chooses otherwise), so identical seeds replay identical logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geoframe import FrameAnchor, GeoFix, LocalPose, local_to_geo, normalize_heading
from .worldmodel import ObstacleSpec, World


@dataclass(frozen=True)
class RadarParams:
    fov_half_angle: float = 0.175   # rad, ~10 deg each side
    max_range: float = 100.0        # m
    n_rays: int = 41                # odd, so the boresight ray exists
    max_detections: int = 8
    mount_offset: float = 3.8       # m ahead of the rear-axle reference

    def __post_init__(self) -> None:
        if not (0.0 < self.fov_half_angle < math.pi / 2.0):
            raise ValueError(f"fov_half_angle {self.fov_half_angle} outside (0, pi/2)")
        if not (self.max_range > 0.0):
            raise ValueError(f"max_range {self.max_range} must be > 0")
        if self.n_rays < 3 or self.n_rays % 2 == 0:
            raise ValueError(f"n_rays {self.n_rays} must be odd and >= 3")
        if self.max_detections < 1:
            raise ValueError(f"max_detections {self.max_detections} must be >= 1")


@dataclass(frozen=True)
class RadarDetection:
    """One clustered return: range (m), range rate (m/s, closing < 0), azimuth (rad)."""

    range: float
    range_rate: float
    azimuth: float


@dataclass(frozen=True)
class GpsParams:
    sigma_pos: float = 0.02        # m per axis
    sigma_heading: float = 0.002   # rad
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma_pos < 0.0 or self.sigma_heading < 0.0:
            raise ValueError("noise sigmas must be >= 0")


def ray_rect_intersect(
    origin: tuple[float, float],
    direction: tuple[float, float],
    rect: ObstacleSpec,
) -> float | None:
    """Distance along a unit ray to the rectangle boundary, or None if missed.

    Returns the smallest nonnegative t with origin + t*direction on the
    boundary; from inside the rectangle that is the exit distance. The
    direction must be unit length within 1e-9.
    """
    dx, dy = direction
    norm_err = abs(math.hypot(dx, dy) - 1.0)
    if norm_err > 1e-9:
        raise ValueError(f"ray direction must be unit length (|d| off by {norm_err:.2e})")

    # into the rectangle's body frame
    c, s = math.cos(rect.heading), math.sin(rect.heading)
    ox, oy = origin[0] - rect.x, origin[1] - rect.y
    o = (c * ox + s * oy, -s * ox + c * oy)
    d = (c * dx + s * dy, -s * dx + c * dy)
    half = (rect.length / 2.0, rect.width / 2.0)

    tmin, tmax = -math.inf, math.inf
    for axis in (0, 1):
        if abs(d[axis]) < 1e-15:
            if abs(o[axis]) > half[axis]:
                return None  # parallel to this slab and outside it
            continue
        t1 = (-half[axis] - o[axis]) / d[axis]
        t2 = (half[axis] - o[axis]) / d[axis]
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)

    if tmin > tmax or tmax < 0.0:
        return None
    return tmin if tmin >= 0.0 else tmax


def radar_scan(world: World, ego_velocity: float, params: RadarParams) -> list[RadarDetection]:
    """Cast the ray fan from the mounted sensor and cluster hits per obstacle.

    One detection per obstacle (its minimum-range hit), sorted ascending by
    range, truncated to max_detections. Range rate assumes static obstacles
    and the ego moving at ego_velocity along its heading, so for a hit at
    ray angle a it is -ego_velocity * cos(a).
    """
    pose = world.ego_pose
    heading = pose.heading
    ox = pose.x + params.mount_offset * math.cos(heading)
    oy = pose.y + params.mount_offset * math.sin(heading)

    best: dict[int, tuple[float, float]] = {}  # obstacle id -> (range, ray angle)
    n = params.n_rays
    for i in range(n):
        angle = -params.fov_half_angle + (2.0 * params.fov_half_angle) * i / (n - 1)
        ray_dir = (math.cos(heading + angle), math.sin(heading + angle))
        hit_t: float | None = None
        hit_id = -1
        for obs in world.obstacles:
            t = ray_rect_intersect((ox, oy), ray_dir, obs)
            if t is None or t > params.max_range or t <= 0.0:
                continue
            if hit_t is None or t < hit_t:
                hit_t, hit_id = t, obs.id
        if hit_t is None:
            continue
        prev = best.get(hit_id)
        if prev is None or hit_t < prev[0]:
            best[hit_id] = (hit_t, angle)

    detections = [
        RadarDetection(range=r, range_rate=-ego_velocity * math.cos(a), azimuth=a)
        for r, a in best.values()
    ]
    detections.sort(key=lambda d: d.range)
    return detections[: params.max_detections]


def gps_sample(
    true_pose: LocalPose,
    anchor: FrameAnchor,
    params: GpsParams,
    rng_state: np.random.Generator,
) -> GeoFix:
    """One noisy GPS measurement of the twin pose, reported in degrees.

    Noise is applied in the local frame (independent per-axis position noise
    plus heading noise), then converted through the anchor. Speed passes
    through unnoised. Exactly three normal draws are consumed per call, so
    the stream position is independent of the sigmas.
    """
    nx, ny, nh = (float(n) for n in rng_state.normal(size=3))
    noisy = LocalPose(
        x=true_pose.x + params.sigma_pos * nx,
        y=true_pose.y + params.sigma_pos * ny,
        heading=normalize_heading(true_pose.heading + params.sigma_heading * nh),
        speed=true_pose.speed,
    )
    return local_to_geo(noisy, anchor)
