"""Two-process co-simulation over real UDP datagrams.

The world/plant side ("serve-world") owns the plant, the virtual world and
the sensors, and writes the run log. The controller side
("serve-controller") owns only the guidance logic, mirroring a control box
that knows nothing but the packets it receives. Three datagram streams
connect them:

    pose       world-side plant -> world twin (loopback self-send, so the
               pose hop crosses the real network stack and the impairment
               model like everything else)
    sensor     world -> controller
    actuation  controller -> world

Both processes run a wall-slaved simulation clock: sim_time = elapsed *
pace. Link impairment parameters are simulation-time quantities; senders
scale wall delays by 1/pace so behavior is pace-invariant. Staleness is
always measured in local simulation time, so no cross-process clock
synchronization is needed.

The world side learns the controller's address from the source of the
first accepted actuation packet; until actuation flows (and whenever it
goes stale) a plant-side watchdog applies full brake and the log shows
FAILSAFE. If the controller dies mid-run the vehicle therefore brakes to a
logged FAILSAFE standstill.
"""

from __future__ import annotations

import socket
import subprocess
import sys
import time
from contextlib import closing
from pathlib import Path as FilePath

from ..bridge import (
    ActuationPacket,
    ImpairedSender,
    LinkParams,
    PollingEndpoint,
    PosePacket,
    SensorPacket,
    encode,
    open_udp_socket,
)
from ..geoframe import GeoFix, LocalPose, geo_to_local, local_to_geo
from ..guidance import GuidanceState, guidance_step, project_onto_path
from ..plant import ActuationCommand, plant_step
from ..virtualsensors import gps_sample, radar_scan
from ..worldmodel import footprints_intersect, set_ego_pose
from .common import (
    HOLD_SUCCESS_S,
    MIN_RUN_TIME_S,
    PATH_END_MARGIN_M,
    RADAR_PERIOD_TICKS,
    SENSOR_PERIOD_TICKS,
    STREAM_GPS,
    STREAM_LINK_ACTUATION,
    STREAM_LINK_POSE,
    STREAM_LINK_SENSOR,
    command_from_packet,
    detections_from_packet,
    fix_from_packet,
    make_rng,
    stream_seed,
)
from .runlog import NO_DETECTION, LogRecord, RunMeta, RunResult, read_log, write_log
from .scenario import Scenario

MOVING_SPEED_MIN = 0.5          # m/s: the run counts as "under way" past this
CONTROLLER_SILENCE_EXIT_S = 3.0  # wall s of sensor silence before the controller exits
CONTROLLER_ORPHAN_EXIT_S = 30.0  # wall s with no sensor data at all


class NetworkRunError(RuntimeError):
    pass


def _stream_link(params: LinkParams, root_seed: int, stream_id: int) -> LinkParams:
    return LinkParams(loss_prob=params.loss_prob, latency_ms=params.latency_ms,
                      jitter_ms=params.jitter_ms,
                      seed=stream_seed(root_seed, stream_id, params.seed))


def _self_address(bind_ip: str) -> str:
    return "127.0.0.1" if bind_ip in ("", "0.0.0.0") else bind_ip


def serve_world(
    scenario: Scenario,
    bind_ip: str,
    base_port: int,
    pace: float,
    log_path: str | FilePath,
    max_wall_s: float | None = None,
) -> RunResult:
    """World/plant process: run until the scenario terminates, write the log."""
    path = scenario.build_path()
    world = scenario.build_world(path)
    anchor = scenario.anchor
    plant_params = scenario.plant
    guid = scenario.guidance
    dt = plant_params.dt
    if max_wall_s is None:
        max_wall_s = scenario.max_duration / pace + 60.0

    state = scenario.initial_vehicle_state(path)
    gps_rng = make_rng(scenario.seed, STREAM_GPS, scenario.gps.seed)

    pose_endpoint = PollingEndpoint(open_udp_socket((bind_ip, base_port)))
    act_endpoint = PollingEndpoint(open_udp_socket((bind_ip, base_port + 2)))
    send_sock = open_udp_socket()
    pose_sender = ImpairedSender(send_sock, _stream_link(scenario.link, scenario.seed, STREAM_LINK_POSE), pace)
    sensor_sender = ImpairedSender(send_sock, _stream_link(scenario.link, scenario.seed, STREAM_LINK_SENSOR), pace)
    pose_self_addr = (_self_address(bind_ip), base_port)
    controller_ip: str | None = None

    records: list[LogRecord] = []
    latest_radar: list = []
    act_cmd = ActuationCommand(steer_cmd=0.0, throttle=0.0, brake=1.0)
    last_act_tick: int | None = None
    peak_v = 0.0
    standstill_ticks = 0
    standstill_needed = int(round(HOLD_SUCCESS_S / dt))
    max_ticks = int(round(scenario.max_duration / dt))
    stale_ticks = max(1, int(round(guid.t_stale / dt)))
    reason = "max-duration"

    start = time.monotonic()
    tick = 0
    try:
        while tick < max_ticks:
            now = time.monotonic()
            if now - start > max_wall_s:
                reason = "wall-timeout"
                break
            target_tick = int((now - start) * pace / dt)
            if tick > target_tick:
                time.sleep(min(0.001, (tick - target_tick) * dt / pace))
                pose_sender.flush()
                sensor_sender.flush()
                continue

            if act_endpoint.drain() and act_endpoint.latest_source is not None:
                controller_ip = act_endpoint.latest_source[0]
                last_act_tick = tick
            pose_endpoint.drain()

            act_stale = last_act_tick is None or (tick - last_act_tick) > stale_ticks
            if act_stale:
                mode_label = "FAILSAFE"
                cmd = ActuationCommand(steer_cmd=state.steer, throttle=0.0, brake=1.0)
            else:
                mode_label = "CRUISE"
                assert isinstance(act_endpoint.latest, ActuationPacket)
                cmd = command_from_packet(act_endpoint.latest)

            state = plant_step(state, cmd, plant_params)
            peak_v = max(peak_v, state.v)
            t = tick * dt

            true_pose = LocalPose(x=state.x, y=state.y, heading=state.heading, speed=state.v)
            fix_true = local_to_geo(true_pose, anchor)
            pose_sender.send(
                encode(PosePacket(seq=tick, t_mono_us=int(t * 1e6),
                                  lat=fix_true.lat, lon=fix_true.lon,
                                  heading=fix_true.heading, speed=fix_true.speed)),
                pose_self_addr,
            )

            if pose_endpoint.latest is not None:
                assert isinstance(pose_endpoint.latest, PosePacket)
                try:
                    twin = geo_to_local(fix_from_packet(pose_endpoint.latest), anchor)
                    world = set_ego_pose(world, twin)
                except ValueError:
                    pass  # a crafted-but-crc-valid packet must not kill the world

            if tick % RADAR_PERIOD_TICKS == 0:
                latest_radar = radar_scan(world, world.ego_pose.speed, scenario.radar)
            gps_fix = gps_sample(world.ego_pose, anchor, scenario.gps, gps_rng)

            if tick % SENSOR_PERIOD_TICKS == 0 and controller_ip is not None:
                wire_dets = tuple((d.range, d.range_rate, d.azimuth) for d in latest_radar)
                sensor_sender.send(
                    encode(SensorPacket(seq=tick, t_mono_us=int(t * 1e6),
                                        lat=gps_fix.lat, lon=gps_fix.lon,
                                        heading=gps_fix.heading, speed=gps_fix.speed,
                                        detections=wire_dets)),
                    (controller_ip, base_port + 1),
                )

            pose_sender.flush()
            sensor_sender.flush()

            # collision and tracking error are judged at the true plant pose
            collided_now = footprints_intersect(set_ego_pose(world, true_pose))
            proj = project_onto_path(path, (state.x, state.y))
            nearest = latest_radar[0].range if latest_radar else NO_DETECTION
            records.append(LogRecord(
                tick=tick, t=t, x=state.x, y=state.y, heading=state.heading,
                v=state.v, steer=state.steer, lat=gps_fix.lat, lon=gps_fix.lon,
                nearest_range=nearest, e_lat=proj.e_lat, s_on_path=proj.s,
                mode=mode_label, steer_cmd=cmd.steer_cmd,
                throttle=cmd.throttle, brake=cmd.brake, collision=collided_now,
            ))

            if collided_now:
                reason = "collision"
                break
            if state.v < guid.v_stop_eps and peak_v > MOVING_SPEED_MIN:
                standstill_ticks += 1
                if standstill_ticks >= standstill_needed:
                    reason = "stopped"
                    break
            else:
                standstill_ticks = 0
            if (t > MIN_RUN_TIME_S and state.v < guid.v_stop_eps
                    and path.total_length - proj.s <= PATH_END_MARGIN_M):
                reason = "path-end"
                break
            tick += 1
    finally:
        pose_endpoint.sock.close()
        act_endpoint.sock.close()
        send_sock.close()

    meta = RunMeta(path_length=path.total_length, dt=dt, v_stop_eps=guid.v_stop_eps)
    result = RunResult(records=tuple(records), meta=meta)
    write_log(log_path, result)
    print(f"serve-world: {reason} after {len(records)} ticks", file=sys.stderr)
    return result


def serve_controller(
    scenario: Scenario,
    connect_ip: str,
    base_port: int,
    pace: float,
    bind_ip: str = "0.0.0.0",
    max_wall_s: float | None = None,
) -> None:
    """Controller process: consume sensor packets, emit actuation packets."""
    path = scenario.build_path()
    anchor = scenario.anchor
    plant_params = scenario.plant
    dt = plant_params.dt
    if max_wall_s is None:
        max_wall_s = scenario.max_duration / pace + 60.0

    sensor_endpoint = PollingEndpoint(open_udp_socket((bind_ip, base_port + 1)))
    send_sock = open_udp_socket()
    act_sender = ImpairedSender(send_sock, _stream_link(scenario.link, scenario.seed, STREAM_LINK_ACTUATION), pace)
    act_addr = (connect_ip, base_port + 2)

    gstate = GuidanceState()
    start = time.monotonic()
    last_sensor_wall: float | None = None
    tick = 0
    try:
        while True:
            now = time.monotonic()
            if now - start > max_wall_s:
                break
            if last_sensor_wall is not None and now - last_sensor_wall > CONTROLLER_SILENCE_EXIT_S:
                break
            if last_sensor_wall is None and now - start > CONTROLLER_ORPHAN_EXIT_S:
                break
            target_tick = int((now - start) * pace / dt)
            if tick > target_tick:
                time.sleep(min(0.001, (tick - target_tick) * dt / pace))
                act_sender.flush()
                continue

            fresh = sensor_endpoint.drain()
            fix: GeoFix | None = None
            dets = None
            if fresh and sensor_endpoint.latest is not None:
                last_sensor_wall = now
                assert isinstance(sensor_endpoint.latest, SensorPacket)
                try:
                    fix = fix_from_packet(sensor_endpoint.latest)
                    dets = detections_from_packet(sensor_endpoint.latest)
                except ValueError:
                    fix, dets = None, None

            cmd, gstate = guidance_step(fix, dets, gstate, path, anchor,
                                        scenario.guidance, plant_params, dt)
            act_sender.send(
                encode(ActuationPacket(seq=tick, t_mono_us=int(tick * dt * 1e6),
                                       steer_cmd=cmd.steer_cmd,
                                       throttle=cmd.throttle, brake=cmd.brake)),
                act_addr,
            )
            act_sender.flush()
            tick += 1
    finally:
        sensor_endpoint.sock.close()
        send_sock.close()
    print(f"serve-controller: done after {tick} ticks", file=sys.stderr)


def find_free_base_port(bind_ip: str = "127.0.0.1", tries: int = 64) -> int:
    """Find a base port with three consecutive free UDP ports above it."""
    import random

    for _ in range(tries):
        base = random.randrange(20000, 60000)
        socks = []
        try:
            for off in range(3):
                s = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
                s.bind((bind_ip, base + off))
                socks.append(s)
            return base
        except OSError:
            continue
        finally:
            for s in socks:
                with closing(s):
                    pass
    raise NetworkRunError("could not find three consecutive free UDP ports")


def run_networked(
    scenario_file: str | FilePath,
    log_path: str | FilePath,
    pace: float = 1.0,
    base_port: int | None = None,
    seed: int | None = None,
    max_duration: float | None = None,
    timeout_margin_s: float = 60.0,
) -> RunResult:
    """Spawn serve-world and serve-controller on loopback and collect the log."""
    from .scenario import load_scenario  # early validation, fail before spawning

    scenario = load_scenario(scenario_file)
    if base_port is None:
        base_port = find_free_base_port()
    duration = max_duration if max_duration is not None else scenario.max_duration

    common = ["--base-port", str(base_port), "--pace", str(pace)]
    if seed is not None:
        common += ["--seed", str(seed)]
    if max_duration is not None:
        common += ["--max-duration", str(max_duration)]
    world_cmd = [sys.executable, "-m", "vve.cli", "serve-world", str(scenario_file),
                 "--bind", "127.0.0.1", "--log", str(log_path)] + common
    ctrl_cmd = [sys.executable, "-m", "vve.cli", "serve-controller", str(scenario_file),
                "--connect", "127.0.0.1", "--bind", "127.0.0.1"] + common

    world = subprocess.Popen(world_cmd, stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)
    controller = subprocess.Popen(ctrl_cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    try:
        try:
            world.wait(timeout=duration / pace + timeout_margin_s)
        except subprocess.TimeoutExpired as exc:
            raise NetworkRunError("world process did not terminate in time") from exc
    finally:
        controller.terminate()
        try:
            controller.wait(timeout=5.0)
        except subprocess.TimeoutExpired:
            controller.kill()
        if world.poll() is None:
            world.kill()

    stderr = world.stderr.read().decode(errors="replace") if world.stderr else ""
    if world.returncode not in (0, 2):
        raise NetworkRunError(
            f"world process exited with {world.returncode}: {stderr.strip()[-500:]}"
        )
    return read_log(log_path)
