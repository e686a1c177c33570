"""Single-process deterministic co-simulation loop.

Every tick runs the same fixed stage order:

    1. plant_step with the actuation computed on the previous tick
    2. true plant state -> geodetic fix -> encoded pose packet
    3. pose packet decoded, ego twin moved in the world
    4. sensors sample on their rate schedule (radar 20 Hz, GPS 100 Hz,
       sensor packet assembled at 50 Hz)
    5. sensor packet decoded -> guidance step
    6. the emitted actuation is stored for the next tick

The one-tick actuation delay gives the dataflow the same shape as the
two-process mode (a command computed at tick k acts at k+1). Packets
really do pass through encode/decode here, so the codec (including its
f32 narrowing) is part of the loop under test, and runs are byte-for-byte
reproducible for a given (scenario, seed).
"""

from __future__ import annotations

from ..bridge import ActuationPacket, PosePacket, SensorPacket, StreamReceiver, encode
from ..geoframe import LocalPose, geo_to_local, local_to_geo
from ..guidance import GuidanceState, Mode, guidance_step
from ..plant import IDLE_COMMAND, plant_step
from ..virtualsensors import gps_sample, radar_scan
from ..worldmodel import footprints_intersect, set_ego_pose
from .common import (
    HOLD_SUCCESS_S,
    MIN_RUN_TIME_S,
    PATH_END_MARGIN_M,
    RADAR_PERIOD_TICKS,
    SENSOR_PERIOD_TICKS,
    STREAM_GPS,
    command_from_packet,
    detections_from_packet,
    fix_from_packet,
    make_rng,
)
from .runlog import NO_DETECTION, LogRecord, RunMeta, RunResult
from .scenario import Scenario


def run_lockstep(scenario: Scenario) -> RunResult:
    path = scenario.build_path()
    world = scenario.build_world(path)
    anchor = scenario.anchor
    plant_params = scenario.plant
    guid = scenario.guidance
    dt = plant_params.dt

    state = scenario.initial_vehicle_state(path)
    gstate = GuidanceState()
    gps_rng = make_rng(scenario.seed, STREAM_GPS, scenario.gps.seed)

    pose_rx, sensor_rx, act_rx = StreamReceiver(), StreamReceiver(), StreamReceiver()
    act_cmd = IDLE_COMMAND
    latest_radar: list = []

    records: list[LogRecord] = []
    hold_ticks = 0
    hold_ticks_needed = int(round(HOLD_SUCCESS_S / dt))
    max_ticks = int(round(scenario.max_duration / dt))

    for tick in range(max_ticks):
        t = tick * dt

        # 1. plant advances under the previous tick's command
        state = plant_step(state, act_cmd, plant_params)

        # 2. true pose crosses the bridge as a pose packet
        true_pose = LocalPose(x=state.x, y=state.y, heading=state.heading, speed=state.v)
        fix_true = local_to_geo(true_pose, anchor)
        pose_bytes = encode(PosePacket(seq=tick, t_mono_us=tick * 10_000,
                                       lat=fix_true.lat, lon=fix_true.lon,
                                       heading=fix_true.heading, speed=fix_true.speed))
        pose_pkt = pose_rx.offer(pose_bytes)
        assert pose_pkt is not None  # lockstep never reorders

        # 3. the ego twin follows the decoded pose
        twin_fix = fix_from_packet(pose_pkt)
        world = set_ego_pose(world, geo_to_local(twin_fix, anchor))
        collided_now = footprints_intersect(world)

        # 4. sensors on their schedule
        if tick % RADAR_PERIOD_TICKS == 0:
            latest_radar = radar_scan(world, world.ego_pose.speed, scenario.radar)
        gps_fix = gps_sample(world.ego_pose, anchor, scenario.gps, gps_rng)

        guid_fix = None
        guid_dets = None
        if tick % SENSOR_PERIOD_TICKS == 0:
            wire_dets = tuple(
                (d.range, d.range_rate, d.azimuth) for d in latest_radar
            )
            sensor_bytes = encode(SensorPacket(seq=tick, t_mono_us=tick * 10_000,
                                               lat=gps_fix.lat, lon=gps_fix.lon,
                                               heading=gps_fix.heading, speed=gps_fix.speed,
                                               detections=wire_dets))
            sensor_pkt = sensor_rx.offer(sensor_bytes)
            assert sensor_pkt is not None
            guid_fix = fix_from_packet(sensor_pkt)
            guid_dets = detections_from_packet(sensor_pkt)

        # 5. controller tick
        cmd, gstate = guidance_step(guid_fix, guid_dets, gstate, path, anchor,
                                    guid, plant_params, dt)

        # 6. the command crosses the bridge and applies next tick
        act_bytes = encode(ActuationPacket(seq=tick, t_mono_us=tick * 10_000,
                                           steer_cmd=cmd.steer_cmd,
                                           throttle=cmd.throttle, brake=cmd.brake))
        act_pkt = act_rx.offer(act_bytes)
        assert act_pkt is not None
        act_cmd = command_from_packet(act_pkt)

        nearest = latest_radar[0].range if latest_radar else NO_DETECTION
        records.append(LogRecord(
            tick=tick, t=t, x=state.x, y=state.y, heading=state.heading,
            v=state.v, steer=state.steer, lat=gps_fix.lat, lon=gps_fix.lon,
            nearest_range=nearest, e_lat=gstate.e_lat, s_on_path=gstate.s_on_path,
            mode=gstate.mode.name, steer_cmd=act_cmd.steer_cmd,
            throttle=act_cmd.throttle, brake=act_cmd.brake, collision=collided_now,
        ))

        if collided_now:
            break
        if gstate.mode is Mode.HOLD and state.v < guid.v_stop_eps:
            hold_ticks += 1
            if hold_ticks >= hold_ticks_needed:
                break
        else:
            hold_ticks = 0
        if (t > MIN_RUN_TIME_S and state.v < guid.v_stop_eps
                and path.total_length - gstate.s_on_path <= PATH_END_MARGIN_M):
            break

    meta = RunMeta(path_length=path.total_length, dt=dt, v_stop_eps=guid.v_stop_eps)
    return RunResult(records=tuple(records), meta=meta)
