import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fit_circle_radius
from vve.plant import (
    IDLE_COMMAND,
    ActuationCommand,
    InvalidCommandError,
    PlantParams,
    VehicleState,
    actuation_to_accel,
    plant_step,
)

PARAMS = PlantParams()


def run_steps(state, cmd, params, n):
    for _ in range(n):
        state = plant_step(state, cmd, params)
    return state


def test_straight_line_advance():
    s0 = VehicleState(0.0, 0.0, 0.0, 10.0, 0.0)
    s1 = plant_step(s0, IDLE_COMMAND, PARAMS)
    assert s1.x == pytest.approx(0.1, abs=1e-12)
    assert s1.y == 0.0
    assert s1.heading == 0.0
    assert s1.v == 10.0  # a = 0 keeps speed constant bit-for-bit


@pytest.mark.parametrize("steer", [0.05, 0.1, 0.3])
def test_constant_steer_circle_radius(steer):
    analytic = PARAMS.wheelbase / math.tan(steer)
    v = 5.0
    n = int(2.0 * math.pi * analytic / v / PARAMS.dt) + 1
    state = VehicleState(0.0, 0.0, 0.0, v, steer)
    cmd = ActuationCommand(steer_cmd=steer, throttle=0.0, brake=0.0)
    xs, ys = [], []
    for _ in range(n):
        state = plant_step(state, cmd, PARAMS)
        xs.append(state.x)
        ys.append(state.y)
    fitted = fit_circle_radius(np.asarray(xs), np.asarray(ys))
    assert abs(fitted - analytic) / analytic < 0.005


def test_braking_at_standstill_holds_position():
    state = VehicleState(3.0, 4.0, 0.7, 0.0, 0.0)
    cmd = ActuationCommand(steer_cmd=0.0, throttle=0.0, brake=1.0)
    after = run_steps(state, cmd, PARAMS, 100)
    assert after.v == 0.0
    assert after.x == 3.0
    assert after.y == 4.0


def test_braking_to_stop_never_reverses():
    state = VehicleState(0.0, 0.0, 0.0, 2.0, 0.0)
    cmd = ActuationCommand(steer_cmd=0.0, throttle=0.0, brake=1.0)
    last_x = state.x
    for _ in range(200):
        state = plant_step(state, cmd, PARAMS)
        assert state.v >= 0.0
        assert state.x >= last_x
        last_x = state.x
    assert state.v == 0.0


def test_steer_rate_and_saturation():
    state = VehicleState(0.0, 0.0, 0.0, 1.0, 0.0)
    cmd = ActuationCommand(steer_cmd=10.0, throttle=0.0, brake=0.0)
    max_delta = PARAMS.steer_rate_max * PARAMS.dt
    for _ in range(200):
        prev = state.steer
        state = plant_step(state, cmd, PARAMS)
        assert abs(state.steer - prev) <= max_delta + 1e-15
        assert abs(state.steer) <= PARAMS.steer_max + 1e-15
    assert state.steer == pytest.approx(PARAMS.steer_max)


@given(st.floats(0.0, 20.0))
def test_no_heading_rate_with_zero_steer(v):
    state = VehicleState(0.0, 0.0, 1.0, v, 0.0)
    after = plant_step(state, IDLE_COMMAND, PARAMS)
    assert after.heading == 1.0


@given(st.floats(0.1, 20.0), st.floats(-0.4, 0.4))
@settings(max_examples=50)
def test_coasting_speed_is_exact(v, steer):
    state = VehicleState(0.0, 0.0, 0.0, v, steer)
    cmd = ActuationCommand(steer_cmd=steer, throttle=0.0, brake=0.0)
    after = run_steps(state, cmd, PARAMS, 50)
    assert after.v == v


def test_rk4_step_halving_convergence():
    coarse = PlantParams()
    fine = PlantParams(dt=coarse.dt / 2.0)
    cmd = ActuationCommand(steer_cmd=0.1, throttle=0.3, brake=0.0)
    s_coarse = run_steps(VehicleState(0.0, 0.0, 0.0, 8.0, 0.1), cmd, coarse, 100)
    s_fine = run_steps(VehicleState(0.0, 0.0, 0.0, 8.0, 0.1), cmd, fine, 200)
    assert math.hypot(s_coarse.x - s_fine.x, s_coarse.y - s_fine.y) < 1e-6


def test_actuation_to_accel_scaling():
    assert actuation_to_accel(IDLE_COMMAND, PARAMS) == 0.0
    assert actuation_to_accel(ActuationCommand(0.0, 1.0, 0.0), PARAMS) == pytest.approx(2.5)
    assert actuation_to_accel(ActuationCommand(0.0, 0.0, 0.5), PARAMS) == pytest.approx(-3.0)


def test_both_pedals_rejected():
    with pytest.raises(InvalidCommandError):
        actuation_to_accel(ActuationCommand(0.0, 0.5, 0.5), PARAMS)


def test_command_fraction_bounds():
    with pytest.raises(ValueError):
        ActuationCommand(0.0, 1.2, 0.0)
    with pytest.raises(ValueError):
        ActuationCommand(0.0, 0.0, -0.1)


def test_vehicle_state_validation():
    with pytest.raises(ValueError):
        VehicleState(0.0, 0.0, 0.0, -1.0, 0.0)
    wrapped = VehicleState(0.0, 0.0, 3.0 * math.pi, 0.0, 0.0)
    assert -math.pi <= wrapped.heading < math.pi
