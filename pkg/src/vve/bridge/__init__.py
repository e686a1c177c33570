"""Datagram bridge: wire format, sequence discipline, link impairment, UDP."""

from .endpoints import (
    DEFAULT_ACTUATION_PORT,
    DEFAULT_POSE_PORT,
    DEFAULT_SENSOR_PORT,
    PollingEndpoint,
    StreamReceiver,
    endpoint_recv,
    open_udp_socket,
    seq_is_newer,
)
from .link import ImpairedSender, LinkParams, link_impair
from .wire import (
    ACTUATION_PACKET_LEN,
    DETECTION_LEN,
    MSG_TYPE_ACTUATION,
    MSG_TYPE_POSE,
    MSG_TYPE_SENSOR,
    POSE_PACKET_LEN,
    SENSOR_PACKET_BASE_LEN,
    ActuationPacket,
    BadCrcError,
    BadLengthError,
    BadMagicError,
    Packet,
    PosePacket,
    SensorPacket,
    UnknownTypeError,
    WireError,
    decode,
    encode,
)

__all__ = [
    "ACTUATION_PACKET_LEN",
    "ActuationPacket",
    "BadCrcError",
    "BadLengthError",
    "BadMagicError",
    "DEFAULT_ACTUATION_PORT",
    "DEFAULT_POSE_PORT",
    "DEFAULT_SENSOR_PORT",
    "DETECTION_LEN",
    "ImpairedSender",
    "LinkParams",
    "MSG_TYPE_ACTUATION",
    "MSG_TYPE_POSE",
    "MSG_TYPE_SENSOR",
    "POSE_PACKET_LEN",
    "Packet",
    "PollingEndpoint",
    "PosePacket",
    "SENSOR_PACKET_BASE_LEN",
    "SensorPacket",
    "StreamReceiver",
    "UnknownTypeError",
    "WireError",
    "decode",
    "encode",
    "endpoint_recv",
    "link_impair",
    "open_udp_socket",
    "seq_is_newer",
]
