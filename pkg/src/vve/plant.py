"""Stand-in vehicle plant: kinematic bicycle driven by steer/throttle/brake.

Kinematic (no tire slip) is adequate for the low-speed parking-lot regime
this toolkit targets and keeps an analytic oracle: at constant steer delta
the trajectory is a circle of radius wheelbase / tan(delta). Integration is
RK4 at a fixed step; the steering actuator is a pure rate limit. There is
no reverse gear: speed is clamped at zero, and braking at standstill holds
the vehicle exactly still.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geoframe import normalize_heading


class InvalidCommandError(ValueError):
    """Throttle and brake commanded simultaneously."""


@dataclass(frozen=True)
class PlantParams:
    wheelbase: float = 2.85        # m
    steer_max: float = 0.5         # rad, road-wheel angle
    steer_rate_max: float = 0.6    # rad/s
    a_throttle_max: float = 2.5    # m/s^2 at throttle 1.0
    a_brake_max: float = 6.0       # m/s^2 at brake 1.0
    dt: float = 0.01               # s

    def __post_init__(self) -> None:
        for name in ("wheelbase", "steer_max", "steer_rate_max", "a_throttle_max", "a_brake_max", "dt"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"plant parameter {name} must be > 0")


@dataclass(frozen=True)
class VehicleState:
    """Rear-axle pose in the local frame plus speed and road-wheel angle."""

    x: float
    y: float
    heading: float
    v: float
    steer: float

    def __post_init__(self) -> None:
        if not (self.v >= 0.0):
            raise ValueError(f"speed {self.v} must be >= 0")
        object.__setattr__(self, "heading", normalize_heading(self.heading))


@dataclass(frozen=True)
class ActuationCommand:
    """Normalized CAN-style output: road-wheel angle plus pedal fractions."""

    steer_cmd: float
    throttle: float
    brake: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.throttle <= 1.0):
            raise ValueError(f"throttle {self.throttle} outside [0, 1]")
        if not (0.0 <= self.brake <= 1.0):
            raise ValueError(f"brake {self.brake} outside [0, 1]")


IDLE_COMMAND = ActuationCommand(steer_cmd=0.0, throttle=0.0, brake=0.0)


def actuation_to_accel(cmd: ActuationCommand, params: PlantParams) -> float:
    """Map pedal fractions to longitudinal acceleration in m/s^2."""
    if cmd.throttle > 0.0 and cmd.brake > 0.0:
        raise InvalidCommandError(
            f"throttle {cmd.throttle} and brake {cmd.brake} both engaged"
        )
    return cmd.throttle * params.a_throttle_max - cmd.brake * params.a_brake_max


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def plant_step(state: VehicleState, cmd: ActuationCommand, params: PlantParams) -> VehicleState:
    """Advance the plant by one fixed step dt.

    The steer actuator first slews toward the (saturated) command at most
    steer_rate_max * dt, then the bicycle ODE

        xdot = v cos(psi), ydot = v sin(psi),
        psidot = v tan(steer) / wheelbase, vdot = a

    is integrated with one RK4 step at constant steer and accel. Deceleration
    is cut once speed hits zero so braking never drives the plant backward.
    """
    target = _clamp(cmd.steer_cmd, -params.steer_max, params.steer_max)
    max_delta = params.steer_rate_max * params.dt
    steer = state.steer + _clamp(target - state.steer, -max_delta, max_delta)

    a = actuation_to_accel(cmd, params)
    tan_steer_over_l = math.tan(steer) / params.wheelbase

    def deriv(heading: float, v: float) -> tuple[float, float, float, float]:
        v_eff = v if v > 0.0 else 0.0
        dv = a if (v > 0.0 or a > 0.0) else 0.0
        return (
            v_eff * math.cos(heading),
            v_eff * math.sin(heading),
            v_eff * tan_steer_over_l,
            dv,
        )

    dt = params.dt
    k1 = deriv(state.heading, state.v)
    k2 = deriv(state.heading + 0.5 * dt * k1[2], state.v + 0.5 * dt * k1[3])
    k3 = deriv(state.heading + 0.5 * dt * k2[2], state.v + 0.5 * dt * k2[3])
    k4 = deriv(state.heading + dt * k3[2], state.v + dt * k3[3])

    sixth = dt / 6.0
    x = state.x + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    y = state.y + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    heading = state.heading + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    v = state.v + sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

    return VehicleState(x=x, y=y, heading=heading, v=max(v, 0.0), steer=steer)
