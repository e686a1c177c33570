"""Fixed-layout binary wire format for the pose/sensor/actuation datagrams.

Little-endian throughout, one packet per datagram, CRC-32 (the reflected
IEEE polynomial, i.e. zlib.crc32) over every byte preceding the checksum.
Layouts:

    pose       "VVE1" u8=1 seq:u32 t_mono_us:u64 lat,lon,heading,speed:f64  crc:u32   (53 B)
    sensor     "VVE1" u8=2 seq:u32 t_mono_us:u64 lat,lon,heading,speed:f64
               n_det:u8 then n_det * (range,range_rate,azimuth:f32)         crc:u32   (54 + 12 n B)
    actuation  "VVE1" u8=3 seq:u32 t_mono_us:u64 steer,throttle,brake:f32   crc:u32   (33 B)

Pose and sensor data are state, not events: receivers keep the newest
accepted sequence number and drop duplicates and reorders (see endpoints).
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

MAGIC = b"VVE1"

MSG_TYPE_POSE = 1
MSG_TYPE_SENSOR = 2
MSG_TYPE_ACTUATION = 3

_POSE_FMT = "<4sBIQdddd"
_SENSOR_HEAD_FMT = "<4sBIQddddB"
_DETECTION_FMT = "<fff"
_ACT_FMT = "<4sBIQfff"
_CRC_FMT = "<I"

POSE_PACKET_LEN = struct.calcsize(_POSE_FMT) + 4
SENSOR_PACKET_BASE_LEN = struct.calcsize(_SENSOR_HEAD_FMT) + 4
DETECTION_LEN = struct.calcsize(_DETECTION_FMT)
ACTUATION_PACKET_LEN = struct.calcsize(_ACT_FMT) + 4

MAX_WIRE_DETECTIONS = 255


class WireError(ValueError):
    """Base class for datagram decode failures."""


class BadMagicError(WireError):
    pass


class BadLengthError(WireError):
    pass


class BadCrcError(WireError):
    pass


class UnknownTypeError(WireError):
    pass


@dataclass(frozen=True)
class PosePacket:
    seq: int
    t_mono_us: int
    lat: float
    lon: float
    heading: float
    speed: float


@dataclass(frozen=True)
class SensorPacket:
    seq: int
    t_mono_us: int
    lat: float
    lon: float
    heading: float
    speed: float
    detections: tuple[tuple[float, float, float], ...]  # (range, range_rate, azimuth)


@dataclass(frozen=True)
class ActuationPacket:
    seq: int
    t_mono_us: int
    steer_cmd: float
    throttle: float
    brake: float


Packet = PosePacket | SensorPacket | ActuationPacket


def _check_common(pkt: Packet) -> None:
    if not (0 <= pkt.seq < 2**32):
        raise ValueError(f"seq {pkt.seq} outside u32 range")
    if not (0 <= pkt.t_mono_us < 2**64):
        raise ValueError(f"t_mono_us {pkt.t_mono_us} outside u64 range")


def _append_crc(body: bytes) -> bytes:
    return body + struct.pack(_CRC_FMT, zlib.crc32(body) & 0xFFFFFFFF)


def encode(pkt: Packet) -> bytes:
    """Serialize a packet, validating its invariants first."""
    _check_common(pkt)
    if isinstance(pkt, PosePacket):
        if not (-math.pi <= pkt.heading < math.pi):
            raise ValueError(f"pose heading {pkt.heading} not normalized into [-pi, pi)")
        body = struct.pack(_POSE_FMT, MAGIC, MSG_TYPE_POSE, pkt.seq, pkt.t_mono_us,
                           pkt.lat, pkt.lon, pkt.heading, pkt.speed)
    elif isinstance(pkt, SensorPacket):
        if len(pkt.detections) > MAX_WIRE_DETECTIONS:
            raise ValueError(f"{len(pkt.detections)} detections exceed the u8 count field")
        body = struct.pack(_SENSOR_HEAD_FMT, MAGIC, MSG_TYPE_SENSOR, pkt.seq, pkt.t_mono_us,
                           pkt.lat, pkt.lon, pkt.heading, pkt.speed, len(pkt.detections))
        for det in pkt.detections:
            body += struct.pack(_DETECTION_FMT, *det)
    elif isinstance(pkt, ActuationPacket):
        if not (0.0 <= pkt.throttle <= 1.0 and 0.0 <= pkt.brake <= 1.0):
            raise ValueError(f"throttle {pkt.throttle} / brake {pkt.brake} outside [0, 1]")
        body = struct.pack(_ACT_FMT, MAGIC, MSG_TYPE_ACTUATION, pkt.seq, pkt.t_mono_us,
                           pkt.steer_cmd, pkt.throttle, pkt.brake)
    else:
        raise TypeError(f"cannot encode {type(pkt).__name__}")
    return _append_crc(body)


def decode(data: bytes) -> Packet:
    """Parse one datagram, rejecting bad magic, unknown type, wrong length
    or a failed checksum with distinct error types."""
    if len(data) < 5:
        raise BadLengthError(f"{len(data)} bytes is shorter than any packet header")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}")
    msg_type = data[4]

    if msg_type == MSG_TYPE_POSE:
        expected = POSE_PACKET_LEN
    elif msg_type == MSG_TYPE_SENSOR:
        if len(data) < SENSOR_PACKET_BASE_LEN:
            raise BadLengthError(f"sensor packet of {len(data)} bytes is truncated")
        n_det = data[struct.calcsize(_SENSOR_HEAD_FMT) - 1]
        expected = SENSOR_PACKET_BASE_LEN + DETECTION_LEN * n_det
    elif msg_type == MSG_TYPE_ACTUATION:
        expected = ACTUATION_PACKET_LEN
    else:
        raise UnknownTypeError(f"unknown msg_type {msg_type}")
    if len(data) != expected:
        raise BadLengthError(f"msg_type {msg_type}: got {len(data)} bytes, expected {expected}")

    (stored_crc,) = struct.unpack_from(_CRC_FMT, data, len(data) - 4)
    computed = zlib.crc32(data[:-4]) & 0xFFFFFFFF
    if stored_crc != computed:
        raise BadCrcError(f"crc mismatch: stored {stored_crc:#010x}, computed {computed:#010x}")

    if msg_type == MSG_TYPE_POSE:
        _, _, seq, t, lat, lon, heading, speed = struct.unpack(_POSE_FMT, data[:-4])
        return PosePacket(seq=seq, t_mono_us=t, lat=lat, lon=lon, heading=heading, speed=speed)
    if msg_type == MSG_TYPE_SENSOR:
        head = struct.calcsize(_SENSOR_HEAD_FMT)
        _, _, seq, t, lat, lon, heading, speed, n_det = struct.unpack(_SENSOR_HEAD_FMT, data[:head])
        dets = tuple(
            struct.unpack_from(_DETECTION_FMT, data, head + i * DETECTION_LEN)
            for i in range(n_det)
        )
        return SensorPacket(seq=seq, t_mono_us=t, lat=lat, lon=lon, heading=heading,
                            speed=speed, detections=dets)
    _, _, seq, t, steer, throttle, brake = struct.unpack(_ACT_FMT, data[:-4])
    return ActuationPacket(seq=seq, t_mono_us=t, steer_cmd=steer, throttle=throttle, brake=brake)
