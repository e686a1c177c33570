"""Geodetic <-> local metric frame conversion anchored at the matched start point.

The local frame is an equirectangular tangent plane on a sphere: x points
east, y points north, both in meters from the anchor. The meridian scale
cos(lat0) is frozen at the anchor so the mapping stays affine and exactly
invertible. Good to sub-centimeter within a couple of kilometers, which is
the scale this toolkit operates at.

Heading convention, fixed project-wide: radians, counter-clockwise positive,
zero along local east, normalized into [-pi, pi). Compass-style inputs
(degrees clockwise from north) are converted once at the ingestion boundary
via :func:`compass_to_math_heading`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6378137.0

# cos(lat0) must stay bounded away from zero for the frame to be invertible
MAX_ANCHOR_LAT_DEG = 89.0

_DEG_TO_M = math.pi / 180.0 * EARTH_RADIUS_M  # meters per degree of latitude


class DegenerateAnchorError(ValueError):
    """Anchor latitude too close to a pole; east scale cos(lat0) degenerates."""


class InvalidHeadingError(ValueError):
    """Heading input is NaN or infinite."""


def normalize_heading(heading: float) -> float:
    """Wrap an angle in radians into the half-open range [-pi, pi)."""
    if -math.pi <= heading < math.pi:
        return heading
    wrapped = (heading + math.pi) % (2.0 * math.pi) - math.pi
    if wrapped >= math.pi:  # % can round up to the modulus itself
        wrapped = -math.pi
    return wrapped


@dataclass(frozen=True)
class GeoFix:
    """One geodetic sample: position in degrees, heading and speed as above."""

    lat: float
    lon: float
    heading: float
    speed: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")
        if not math.isfinite(self.heading):
            raise InvalidHeadingError(f"non-finite heading {self.heading}")
        if not (self.speed >= 0.0):
            raise ValueError(f"speed {self.speed} must be >= 0")
        object.__setattr__(self, "heading", normalize_heading(self.heading))


@dataclass(frozen=True)
class FrameAnchor:
    """Origin of the local frame: the virtually matched starting location."""

    lat0: float
    lon0: float
    R_earth: float = EARTH_RADIUS_M

    def __post_init__(self) -> None:
        if abs(self.lat0) >= MAX_ANCHOR_LAT_DEG:
            raise DegenerateAnchorError(
                f"anchor latitude {self.lat0} too close to a pole (|lat0| must be < {MAX_ANCHOR_LAT_DEG})"
            )
        if not (self.R_earth > 0.0):
            raise ValueError(f"sphere radius {self.R_earth} must be > 0")

    @property
    def cos_lat0(self) -> float:
        return math.cos(math.radians(self.lat0))


@dataclass(frozen=True)
class LocalPose:
    """Pose in the anchored local frame: meters east/north, heading, speed."""

    x: float
    y: float
    heading: float
    speed: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.heading):
            raise InvalidHeadingError(f"non-finite heading {self.heading}")
        object.__setattr__(self, "heading", normalize_heading(self.heading))


def geo_to_local(fix: GeoFix, anchor: FrameAnchor) -> LocalPose:
    """Project a geodetic fix onto the anchored tangent plane.

    x = (lon - lon0) * (pi/180) * R * cos(lat0)
    y = (lat - lat0) * (pi/180) * R

    Heading and speed pass through unchanged.
    """
    k = math.pi / 180.0 * anchor.R_earth
    x = (fix.lon - anchor.lon0) * k * anchor.cos_lat0
    y = (fix.lat - anchor.lat0) * k
    return LocalPose(x=x, y=y, heading=fix.heading, speed=fix.speed)


def local_to_geo(pose: LocalPose, anchor: FrameAnchor) -> GeoFix:
    """Exact algebraic inverse of :func:`geo_to_local`."""
    k = math.pi / 180.0 * anchor.R_earth
    lat = anchor.lat0 + pose.y / k
    lon = anchor.lon0 + pose.x / (k * anchor.cos_lat0)
    return GeoFix(lat=lat, lon=lon, heading=pose.heading, speed=pose.speed)


def compass_to_math_heading(compass_deg: float) -> float:
    """Convert degrees clockwise-from-north to the project heading convention.

    0 deg (north) maps to pi/2, 90 deg (east) to 0; result is in [-pi, pi).
    """
    if not math.isfinite(compass_deg):
        raise InvalidHeadingError(f"non-finite compass heading {compass_deg}")
    return normalize_heading(math.pi / 2.0 - math.radians(compass_deg))
