"""Path following and speed control: the controller-box stand-in.

Lateral control is pure pursuit with a speed-scaled lookahead; the goal
point is taken by arc-length offset along the resampled polyline, which is
well defined even on sparse recordings. Longitudinal control tracks the
minimum of a path-end taper and an obstacle braking law (constant planned
deceleration toward a standoff gap), through a PI loop with anti-windup.

The stop behavior is a small mode machine:

    CRUISE   -> BRAKING   when the obstacle law starts governing
    BRAKING  -> HOLD      once at standstill close behind the obstacle
    HOLD     -> CRUISE    only when resuming is enabled and the radar has
                          been clear for t_clear (off by default: the
                          vehicle stays stopped)
    any      -> FAILSAFE  when sensor data goes stale (full brake)
    FAILSAFE -> CRUISE    when fresh data returns

The per-tick transition function is pure: state in, state out.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from pathlib import Path as FilePath

import numpy as np

from .geoframe import (
    FrameAnchor,
    GeoFix,
    LocalPose,
    compass_to_math_heading,
    geo_to_local,
)
from .plant import ActuationCommand, PlantParams
from .virtualsensors import RadarDetection


class DegeneratePathError(ValueError):
    """Fewer than two distinct waypoints, or a path too short to resample."""


class WaypointGapError(ValueError):
    """Consecutive recorded waypoints further apart than the allowed gap."""


class ConfigurationError(RuntimeError):
    """Controller stepped before its path/anchor were initialized."""


MAX_WAYPOINT_GAP_M = 50.0
DUPLICATE_EPS_M = 0.01

# brake fraction held at standstill in HOLD and FAILSAFE
HOLD_BRAKE = 1.0

# integral separation: the PI integrator only trims near the setpoint;
# large transients are carried by the proportional path alone
INTEGRAL_BAND = 0.5  # m/s


class Mode(enum.Enum):
    CRUISE = "CRUISE"
    BRAKING = "BRAKING"
    HOLD = "HOLD"
    FAILSAFE = "FAILSAFE"


@dataclass(frozen=True)
class Path:
    """Polyline resampled at near-uniform spacing with cumulative arc length."""

    points: np.ndarray   # (N, 2) meters
    s: np.ndarray        # (N,) cumulative arc length, strictly increasing
    ds: float            # nominal spacing used for resampling

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise DegeneratePathError("path needs at least 2 points")

    @property
    def total_length(self) -> float:
        return float(self.s[-1])

    def point_at(self, s_query: float) -> tuple[float, float]:
        """Linear interpolation along the polyline, clamped to the ends."""
        s_clamped = min(max(s_query, 0.0), self.total_length)
        x = float(np.interp(s_clamped, self.s, self.points[:, 0]))
        y = float(np.interp(s_clamped, self.s, self.points[:, 1]))
        return x, y


@dataclass(frozen=True)
class PathProjection:
    s: float             # arc length of the foot point
    e_lat: float         # signed lateral offset, positive = left of tangent
    heading_ref: float   # path tangent at the foot point


@dataclass(frozen=True)
class GuidanceParams:
    lookahead_gain: float = 0.8   # s of travel converted to lookahead
    lookahead_min: float = 3.0    # m
    lookahead_max: float = 12.0   # m
    v_target: float = 5.0         # m/s
    d_safe: float = 5.0           # m standoff behind the nearest detection
    a_brake_plan: float = 3.0     # m/s^2 planned deceleration
    v_stop_eps: float = 0.05      # m/s, "stopped" threshold
    kp: float = 0.8
    ki: float = 0.2
    resume_enabled: bool = False
    t_clear: float = 2.0          # s of clear radar before resuming
    t_stale: float = 0.2          # s without sensor data before failsafe

    def __post_init__(self) -> None:
        if self.lookahead_min > self.lookahead_max:
            raise ValueError("lookahead_min must be <= lookahead_max")
        if not (self.d_safe > 0.0 and self.a_brake_plan > 0.0):
            raise ValueError("d_safe and a_brake_plan must be > 0")


@dataclass(frozen=True)
class GuidanceState:
    """Controller state threaded through guidance_step.

    Besides the mode machine and PI accumulator this caches the latest
    accepted measurement (pose + detections) so the controller can keep
    running between sensor packets, and carries per-step diagnostics
    (e_lat, s_on_path, v_cmd, nearest_range) for logging.
    """

    mode: Mode = Mode.CRUISE
    integrator: float = 0.0
    last_sensor_age: float = 0.0
    clear_timer: float = 0.0
    last_pose: LocalPose | None = None
    last_detections: tuple[RadarDetection, ...] = ()
    last_steer_cmd: float = 0.0
    e_lat: float = 0.0
    s_on_path: float = 0.0
    v_cmd: float = 0.0
    nearest_range: float = -1.0


def load_waypoints_csv(path: str | FilePath) -> list[GeoFix]:
    """Read a recorded waypoint file: header row, columns lat_deg, lon_deg.

    Optional columns heading_deg (compass, clockwise from north) and
    speed_mps are used when present; any other columns are ignored.
    """
    fixes: list[GeoFix] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"lat_deg", "lon_deg"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: waypoint CSV must have lat_deg and lon_deg columns")
        for row in reader:
            heading = 0.0
            if row.get("heading_deg") not in (None, ""):
                heading = compass_to_math_heading(float(row["heading_deg"]))
            speed = 0.0
            if row.get("speed_mps") not in (None, ""):
                speed = float(row["speed_mps"])
            fixes.append(GeoFix(lat=float(row["lat_deg"]), lon=float(row["lon_deg"]),
                                heading=heading, speed=speed))
    return fixes


def build_path(waypoints: list[GeoFix], anchor: FrameAnchor, ds: float = 0.5) -> Path:
    """Convert waypoints to the local frame and resample at spacing ~ds.

    Consecutive near-duplicates (< 1 cm) are dropped before resampling;
    resampling is linear interpolation along the original polyline at
    total_length / round(total_length / ds) spacing, so every sample gap
    stays within [0.5 ds, 1.5 ds].
    """
    if ds <= 0.0:
        raise ValueError("ds must be > 0")
    pts: list[tuple[float, float]] = []
    for fix in waypoints:
        local = geo_to_local(fix, anchor)
        if pts and math.hypot(local.x - pts[-1][0], local.y - pts[-1][1]) < DUPLICATE_EPS_M:
            continue
        pts.append((local.x, local.y))
    if len(pts) < 2:
        raise DegeneratePathError(f"need >= 2 distinct waypoints, got {len(pts)}")

    raw = np.asarray(pts, dtype=float)
    seg = np.hypot(np.diff(raw[:, 0]), np.diff(raw[:, 1]))
    worst = int(np.argmax(seg))
    if seg[worst] > MAX_WAYPOINT_GAP_M:
        raise WaypointGapError(
            f"waypoints {worst} and {worst + 1} are {seg[worst]:.1f} m apart (max {MAX_WAYPOINT_GAP_M})"
        )
    s_raw = np.concatenate(([0.0], np.cumsum(seg)))
    total = float(s_raw[-1])
    if total < 0.5 * ds:
        raise DegeneratePathError(f"path of {total:.3f} m is too short to resample at ds={ds}")

    n_seg = max(1, round(total / ds))
    s_new = np.linspace(0.0, total, n_seg + 1)
    x_new = np.interp(s_new, s_raw, raw[:, 0])
    y_new = np.interp(s_new, s_raw, raw[:, 1])
    points = np.column_stack((x_new, y_new))
    seg_new = np.hypot(np.diff(x_new), np.diff(y_new))
    s = np.concatenate(([0.0], np.cumsum(seg_new)))
    return Path(points=points, s=s, ds=ds)


def project_onto_path(path: Path, position: tuple[float, float]) -> PathProjection:
    """Closest point over all segments; ties resolve to the smaller arc length."""
    p = np.asarray(position, dtype=float)
    a = path.points[:-1]
    d = path.points[1:] - a
    seg_len_sq = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", p - a, d) / seg_len_sq, 0.0, 1.0)
    foot = a + t[:, None] * d
    dist_sq = np.einsum("ij,ij->i", p - foot, p - foot)
    i = int(np.argmin(dist_sq))

    seg_len = math.sqrt(seg_len_sq[i])
    s = float(path.s[i] + t[i] * seg_len)
    tx, ty = d[i] / seg_len
    offx, offy = p - foot[i]
    e_lat = tx * offy - ty * offx
    return PathProjection(s=s, e_lat=float(e_lat), heading_ref=math.atan2(ty, tx))


def pure_pursuit_steer(
    pose: LocalPose,
    path: Path,
    params: GuidanceParams,
    wheelbase: float,
    steer_max: float = 0.5,
) -> float:
    """Steer angle toward the lookahead goal point on the path.

    L_d scales with speed between lookahead_min and lookahead_max; the goal
    sits L_d further along the path than the projection of the current
    position. A goal behind the rear axle (|alpha| > pi/2) saturates the
    command toward the goal side instead of trusting the arc formula; the
    result is always clamped to +-steer_max.
    """
    proj = project_onto_path(path, (pose.x, pose.y))
    lookahead = min(max(params.lookahead_gain * pose.speed, params.lookahead_min), params.lookahead_max)
    gx, gy = path.point_at(proj.s + lookahead)

    dx, dy = gx - pose.x, gy - pose.y
    c, s = math.cos(pose.heading), math.sin(pose.heading)
    alpha = math.atan2(-s * dx + c * dy, c * dx + s * dy)
    if abs(alpha) > math.pi / 2.0:
        return math.copysign(steer_max, alpha)
    steer = math.atan(2.0 * wheelbase * math.sin(alpha) / lookahead)
    return min(max(steer, -steer_max), steer_max)


def speed_command(
    projection: PathProjection,
    path: Path,
    detections: list[RadarDetection] | tuple[RadarDetection, ...],
    params: GuidanceParams,
) -> float:
    """Commanded speed: min of the path-end taper and the obstacle stop law.

    Both use the constant-deceleration braking distance v = sqrt(2 a d):
    the taper reaches zero at the path end, the obstacle law at d_safe
    short of the nearest detection. Detections must be sorted by range.
    """
    remaining = max(path.total_length - projection.s, 0.0)
    v_path = min(params.v_target, math.sqrt(2.0 * params.a_brake_plan * remaining))
    if not detections:
        return v_path
    r = detections[0].range
    if r <= params.d_safe:
        v_obs = 0.0
    else:
        v_obs = math.sqrt(2.0 * params.a_brake_plan * (r - params.d_safe))
    return min(v_path, v_obs)


def _obstacle_speed(detections: tuple[RadarDetection, ...], params: GuidanceParams) -> float:
    if not detections:
        return math.inf
    r = detections[0].range
    if r <= params.d_safe:
        return 0.0
    return math.sqrt(2.0 * params.a_brake_plan * (r - params.d_safe))


def longitudinal_control(
    v_cmd: float,
    v: float,
    state: GuidanceState,
    dt: float,
    params: GuidanceParams,
    plant_limits: PlantParams,
) -> tuple[tuple[float, float], float]:
    """PI speed loop mapped onto pedal fractions.

    Returns ((throttle, brake), new_integrator). Positive accel demand goes
    to throttle, negative to brake, never both. Anti-windup is threefold:
    the integrator freezes while the actuator is saturated against the
    error, only advances inside the integral-separation band around the
    setpoint, and is hard-clamped so ki * integrator stays within the
    stronger actuator authority.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    err = v_cmd - v
    a_unsat = params.kp * err + params.ki * state.integrator
    a = min(max(a_unsat, -plant_limits.a_brake_max), plant_limits.a_throttle_max)

    integrator = state.integrator
    wound_up = (a_unsat > a and err > 0.0) or (a_unsat < a and err < 0.0)
    if params.ki > 0.0 and not wound_up and abs(err) <= INTEGRAL_BAND:
        limit = max(plant_limits.a_throttle_max, plant_limits.a_brake_max) / params.ki
        integrator = min(max(integrator + err * dt, -limit), limit)

    if a >= 0.0:
        return (min(a / plant_limits.a_throttle_max, 1.0), 0.0), integrator
    return (0.0, min(-a / plant_limits.a_brake_max, 1.0)), integrator


def guidance_step(
    fix: GeoFix | None,
    detections: list[RadarDetection] | None,
    state: GuidanceState,
    path: Path | None,
    anchor: FrameAnchor,
    params: GuidanceParams,
    plant: PlantParams,
    dt: float,
) -> tuple[ActuationCommand, GuidanceState]:
    """One controller tick: consume the latest measurement, emit actuation.

    ``fix``/``detections`` are None on ticks without a fresh sensor packet;
    the controller then reuses its cached measurement while the staleness
    watchdog counts up. A detections list arriving with a fresh fix fully
    replaces the cache (an empty list means a clear scan).
    """
    if path is None:
        raise ConfigurationError("guidance stepped without a path")

    if fix is not None:
        pose = geo_to_local(fix, anchor)
        dets = tuple(detections) if detections is not None else ()
        age = 0.0
    else:
        pose = state.last_pose
        dets = state.last_detections
        age = state.last_sensor_age + dt

    if pose is None or age > params.t_stale + 1e-9:  # slack for dt accumulation
        cmd = ActuationCommand(steer_cmd=state.last_steer_cmd, throttle=0.0, brake=HOLD_BRAKE)
        new_state = replace(
            state,
            mode=Mode.FAILSAFE,
            integrator=0.0,
            last_sensor_age=age,
            clear_timer=0.0,
        )
        return cmd, new_state

    mode = state.mode
    if mode is Mode.FAILSAFE:
        mode = Mode.CRUISE  # fresh data restored the link

    proj = project_onto_path(path, (pose.x, pose.y))
    v = pose.speed
    nearest = dets[0].range if dets else -1.0

    remaining = max(path.total_length - proj.s, 0.0)
    v_path = min(params.v_target, math.sqrt(2.0 * params.a_brake_plan * remaining))
    v_obs = _obstacle_speed(dets, params)
    v_cmd = min(v_path, v_obs)

    if mode is Mode.CRUISE and v_obs < v_path:
        mode = Mode.BRAKING
    if mode is Mode.BRAKING and v < params.v_stop_eps and dets and nearest <= params.d_safe + 1.0:
        mode = Mode.HOLD

    clear_timer = state.clear_timer
    if mode is Mode.HOLD:
        if params.resume_enabled:
            clear_timer = 0.0 if dets else clear_timer + dt
            if clear_timer >= params.t_clear:
                mode = Mode.CRUISE
                clear_timer = 0.0
        else:
            clear_timer = 0.0

    if mode is Mode.HOLD:
        cmd = ActuationCommand(steer_cmd=state.last_steer_cmd, throttle=0.0, brake=HOLD_BRAKE)
        integrator = 0.0
    else:
        steer = pure_pursuit_steer(pose, path, params, plant.wheelbase, plant.steer_max)
        (throttle, brake), integrator = longitudinal_control(v_cmd, v, state, dt, params, plant)
        cmd = ActuationCommand(steer_cmd=steer, throttle=throttle, brake=brake)

    new_state = replace(
        state,
        mode=mode,
        integrator=integrator,
        last_sensor_age=age,
        clear_timer=clear_timer,
        last_pose=pose,
        last_detections=dets,
        last_steer_cmd=cmd.steer_cmd,
        e_lat=proj.e_lat,
        s_on_path=proj.s,
        v_cmd=v_cmd,
        nearest_range=nearest,
    )
    return cmd, new_state
