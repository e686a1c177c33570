"""Scenario files: strict JSON schema resolved into ready-to-run objects.

A scenario pins everything a run needs: the frame anchor, the recorded
waypoints (inline or a CSV next to the scenario file), obstacles given in
geodetic pose plus dimensions, parameter overrides per subsystem, the seed
and the run mode. Unknown keys are rejected by name so typos fail loudly;
syntax errors and semantic errors are distinct exception types.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path as FilePath
from typing import Any

from ..bridge import LinkParams
from ..geoframe import FrameAnchor, GeoFix, LocalPose, compass_to_math_heading, geo_to_local
from ..guidance import GuidanceParams, Path, build_path, load_waypoints_csv
from ..plant import PlantParams, VehicleState
from ..virtualsensors import GpsParams, RadarParams
from ..worldmodel import EgoFootprint, ObstacleSpec, World


class ScenarioError(ValueError):
    pass


class ScenarioSyntaxError(ScenarioError):
    """The file is not parseable JSON."""


class ScenarioSemanticError(ScenarioError):
    """The file parses but violates the scenario schema."""


_TOP_LEVEL_KEYS = {
    "name", "anchor", "waypoints_file", "waypoints", "v_target", "obstacles",
    "seed", "max_duration", "mode", "ds", "guidance", "plant", "radar",
    "gps", "link", "ego_footprint",
}
_ANCHOR_KEYS = {"lat0", "lon0", "R_earth"}
_WAYPOINT_KEYS = {"lat_deg", "lon_deg", "heading_deg", "speed_mps"}
_OBSTACLE_KEYS = {"id", "lat", "lon", "heading_deg", "length", "width"}
_MODES = ("lockstep", "udp")


@dataclass(frozen=True)
class Scenario:
    """Fully resolved run description; obstacles already in the local frame."""

    name: str
    anchor: FrameAnchor
    waypoints: tuple[GeoFix, ...]
    obstacles: tuple[ObstacleSpec, ...]
    guidance: GuidanceParams
    plant: PlantParams
    radar: RadarParams
    gps: GpsParams
    link: LinkParams
    ego_footprint: EgoFootprint
    seed: int = 0
    max_duration: float = 120.0
    mode: str = "lockstep"
    ds: float = 0.5
    source_file: str | None = field(default=None, compare=False)

    def build_path(self) -> Path:
        return build_path(list(self.waypoints), self.anchor, self.ds)

    def initial_vehicle_state(self, path: Path) -> VehicleState:
        """Plant starts at the path origin, aligned with the first segment."""
        x0, y0 = path.points[0]
        x1, y1 = path.points[1]
        heading = math.atan2(y1 - y0, x1 - x0)
        return VehicleState(x=float(x0), y=float(y0), heading=heading, v=0.0, steer=0.0)

    def build_world(self, path: Path) -> World:
        start = self.initial_vehicle_state(path)
        ego = LocalPose(x=start.x, y=start.y, heading=start.heading, speed=0.0)
        return World(ego_pose=ego, ego_footprint=self.ego_footprint, obstacles=self.obstacles)

    def to_json_dict(self) -> dict[str, Any]:
        """Resolved scenario as plain JSON-compatible data (for `vve echo`)."""
        return {
            "name": self.name,
            "anchor": dataclasses.asdict(self.anchor),
            "waypoints": [
                {"lat_deg": w.lat, "lon_deg": w.lon, "heading_rad": w.heading, "speed_mps": w.speed}
                for w in self.waypoints
            ],
            "obstacles_local": [dataclasses.asdict(o) for o in self.obstacles],
            "guidance": dataclasses.asdict(self.guidance),
            "plant": dataclasses.asdict(self.plant),
            "radar": dataclasses.asdict(self.radar),
            "gps": dataclasses.asdict(self.gps),
            "link": dataclasses.asdict(self.link),
            "ego_footprint": dataclasses.asdict(self.ego_footprint),
            "seed": self.seed,
            "max_duration": self.max_duration,
            "mode": self.mode,
            "ds": self.ds,
        }


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ScenarioSemanticError(f"{where}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ScenarioSemanticError(f"{where}: unknown key '{key}'")
    for key in required:
        if key not in obj:
            raise ScenarioSemanticError(f"{where}: missing required key '{key}'")


def _build_params(cls, overrides: dict | None, where: str):
    overrides = overrides or {}
    allowed = {f.name for f in dataclasses.fields(cls)}
    _require_keys(overrides, allowed, set(), where)
    try:
        return cls(**overrides)
    except ValueError as exc:
        raise ScenarioSemanticError(f"{where}: {exc}") from exc


def _parse_waypoint(entry: dict, index: int) -> GeoFix:
    where = f"waypoints[{index}]"
    _require_keys(entry, _WAYPOINT_KEYS, {"lat_deg", "lon_deg"}, where)
    heading = 0.0
    if "heading_deg" in entry:
        heading = compass_to_math_heading(float(entry["heading_deg"]))
    try:
        return GeoFix(lat=float(entry["lat_deg"]), lon=float(entry["lon_deg"]),
                      heading=heading, speed=float(entry.get("speed_mps", 0.0)))
    except ValueError as exc:
        raise ScenarioSemanticError(f"{where}: {exc}") from exc


def _parse_obstacle(entry: dict, index: int, anchor: FrameAnchor) -> ObstacleSpec:
    where = f"obstacles[{index}]"
    _require_keys(entry, _OBSTACLE_KEYS, {"id", "lat", "lon", "length", "width"}, where)
    heading = compass_to_math_heading(float(entry.get("heading_deg", 0.0)))
    try:
        fix = GeoFix(lat=float(entry["lat"]), lon=float(entry["lon"]), heading=heading, speed=0.0)
        local = geo_to_local(fix, anchor)
        return ObstacleSpec(id=int(entry["id"]), x=local.x, y=local.y, heading=local.heading,
                            length=float(entry["length"]), width=float(entry["width"]))
    except ValueError as exc:
        raise ScenarioSemanticError(f"{where}: {exc}") from exc


def load_scenario(file: str | FilePath) -> Scenario:
    """Parse, validate and resolve a scenario file.

    Raises ScenarioSyntaxError for malformed JSON (with line/column) and
    ScenarioSemanticError for schema violations; the returned scenario is
    guaranteed to resolve to a valid path and world.
    """
    file = FilePath(file)
    try:
        text = file.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {file}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(
            f"{file}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    _require_keys(raw, _TOP_LEVEL_KEYS, {"anchor"}, str(file))
    anchor_raw = raw["anchor"]
    _require_keys(anchor_raw, _ANCHOR_KEYS, {"lat0", "lon0"}, "anchor")
    try:
        anchor = FrameAnchor(**{k: float(v) for k, v in anchor_raw.items()})
    except ValueError as exc:
        raise ScenarioSemanticError(f"anchor: {exc}") from exc

    if ("waypoints_file" in raw) == ("waypoints" in raw):
        raise ScenarioSemanticError("exactly one of 'waypoints_file' or 'waypoints' is required")
    if "waypoints_file" in raw:
        wp_path = file.parent / raw["waypoints_file"]
        try:
            waypoints = tuple(load_waypoints_csv(wp_path))
        except (OSError, ValueError) as exc:
            raise ScenarioSemanticError(f"waypoints_file {wp_path}: {exc}") from exc
    else:
        entries = raw["waypoints"]
        if not isinstance(entries, list):
            raise ScenarioSemanticError("waypoints: expected a list")
        waypoints = tuple(_parse_waypoint(e, i) for i, e in enumerate(entries))
    if len(waypoints) < 2:
        raise ScenarioSemanticError(f"need at least 2 waypoints, got {len(waypoints)}")

    obstacles_raw = raw.get("obstacles", [])
    if not isinstance(obstacles_raw, list):
        raise ScenarioSemanticError("obstacles: expected a list")
    obstacles = tuple(_parse_obstacle(e, i, anchor) for i, e in enumerate(obstacles_raw))

    guidance = _build_params(GuidanceParams, raw.get("guidance"), "guidance")
    if "v_target" in raw:
        guidance = dataclasses.replace(guidance, v_target=float(raw["v_target"]))
    plant = _build_params(PlantParams, raw.get("plant"), "plant")
    radar = _build_params(RadarParams, raw.get("radar"), "radar")
    gps = _build_params(GpsParams, raw.get("gps"), "gps")
    link = _build_params(LinkParams, raw.get("link"), "link")
    footprint = _build_params(EgoFootprint, raw.get("ego_footprint"), "ego_footprint")

    mode = raw.get("mode", "lockstep")
    if mode not in _MODES:
        raise ScenarioSemanticError(f"mode '{mode}' must be one of {_MODES}")
    max_duration = float(raw.get("max_duration", 120.0))
    if not (max_duration > 0.0):
        raise ScenarioSemanticError(f"max_duration {max_duration} must be > 0")

    scenario = Scenario(
        name=str(raw.get("name", file.stem)),
        anchor=anchor,
        waypoints=waypoints,
        obstacles=obstacles,
        guidance=guidance,
        plant=plant,
        radar=radar,
        gps=gps,
        link=link,
        ego_footprint=footprint,
        seed=int(raw.get("seed", 0)),
        max_duration=max_duration,
        mode=mode,
        ds=float(raw.get("ds", 0.5)),
        source_file=str(file),
    )
    try:
        scenario.build_path()  # surfaces degenerate or gapped waypoint sets now
    except ValueError as exc:
        raise ScenarioSemanticError(f"waypoints do not form a usable path: {exc}") from exc
    return scenario
