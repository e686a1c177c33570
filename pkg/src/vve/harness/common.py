"""Shared run-loop machinery: rates, RNG streams, packet/domain conversion."""

from __future__ import annotations

import numpy as np

from ..bridge import ActuationPacket, PosePacket, SensorPacket
from ..geoframe import GeoFix
from ..plant import ActuationCommand
from ..virtualsensors import RadarDetection

# tick schedule at dt = 10 ms: pose 100 Hz, sensor packets 50 Hz carrying the
# newest 20 Hz radar scan and 100 Hz GPS sample
POSE_PERIOD_TICKS = 1
SENSOR_PERIOD_TICKS = 2
RADAR_PERIOD_TICKS = 5

# run termination
HOLD_SUCCESS_S = 3.0        # continuous standstill that counts as a finished stop
PATH_END_MARGIN_M = 1.0     # how close to the path end a stop counts as arrival
MIN_RUN_TIME_S = 2.0        # ignore the initial standstill while pulling away

# named RNG streams derived from the scenario seed
STREAM_GPS = 1
STREAM_LINK_POSE = 2
STREAM_LINK_SENSOR = 3
STREAM_LINK_ACTUATION = 4


def make_rng(root_seed: int, stream_id: int, sub_seed: int = 0) -> np.random.Generator:
    """Independent, reproducible PCG64 stream for one subsystem."""
    return np.random.default_rng(np.random.PCG64(np.random.SeedSequence([root_seed, stream_id, sub_seed])))


def stream_seed(root_seed: int, stream_id: int, sub_seed: int = 0) -> int:
    """Collapse a stream identity to a single 64-bit seed (for LinkParams)."""
    return int(np.random.SeedSequence([root_seed, stream_id, sub_seed]).generate_state(1, np.uint64)[0])


def fix_from_packet(pkt: PosePacket | SensorPacket) -> GeoFix:
    return GeoFix(lat=pkt.lat, lon=pkt.lon, heading=pkt.heading, speed=pkt.speed)


def detections_from_packet(pkt: SensorPacket) -> list[RadarDetection]:
    dets = [RadarDetection(range=r, range_rate=rr, azimuth=az) for r, rr, az in pkt.detections]
    dets.sort(key=lambda d: d.range)
    return dets


def command_from_packet(pkt: ActuationPacket) -> ActuationCommand:
    """Gateway clamp: wire values are f32 and not trusted to satisfy invariants."""
    throttle = min(max(pkt.throttle, 0.0), 1.0)
    brake = min(max(pkt.brake, 0.0), 1.0)
    if throttle > 0.0 and brake > 0.0:  # never both; braking wins
        throttle = 0.0
    return ActuationCommand(steer_cmd=pkt.steer_cmd, throttle=throttle, brake=brake)
