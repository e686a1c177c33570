"""Desk-scale vehicle-in-virtual-environment co-simulation toolkit.

A stand-in vehicle plant is immersed into a planar virtual world over a
datagram bridge: its pose drives an ego twin, and virtual GPS and radar
measurements flow back to a guidance controller that follows a recorded
path and stops behind detected obstacles.
"""

from .geoframe import (
    FrameAnchor,
    GeoFix,
    LocalPose,
    compass_to_math_heading,
    geo_to_local,
    local_to_geo,
    normalize_heading,
)
from .guidance import GuidanceParams, GuidanceState, Mode, Path, build_path, guidance_step
from .plant import ActuationCommand, PlantParams, VehicleState, plant_step
from .virtualsensors import GpsParams, RadarDetection, RadarParams, gps_sample, radar_scan
from .worldmodel import EgoFootprint, ObstacleSpec, World, footprints_intersect, set_ego_pose

__version__ = "0.1.0"

__all__ = [
    "ActuationCommand",
    "EgoFootprint",
    "FrameAnchor",
    "GeoFix",
    "GpsParams",
    "GuidanceParams",
    "GuidanceState",
    "LocalPose",
    "Mode",
    "ObstacleSpec",
    "Path",
    "PlantParams",
    "RadarDetection",
    "RadarParams",
    "VehicleState",
    "World",
    "__version__",
    "build_path",
    "compass_to_math_heading",
    "footprints_intersect",
    "geo_to_local",
    "gps_sample",
    "guidance_step",
    "local_to_geo",
    "normalize_heading",
    "plant_step",
    "radar_scan",
    "set_ego_pose",
]
