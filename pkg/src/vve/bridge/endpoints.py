"""Datagram endpoints: newest-wins sequence filtering and UDP plumbing.

State packets are idempotent samples, so a receiver only ever moves
forward: a packet is accepted iff its sequence number is newer than the
last accepted one under 32-bit wraparound arithmetic. Stale or duplicate
packets are dropped silently but counted.

The UDP helpers are deliberately poll-based: the co-simulation loops drain
their sockets once per tick and keep only the newest accepted packet, which
is the bounded latest-value queue the rest of the system assumes.
"""

from __future__ import annotations

import socket
from dataclasses import dataclass, field

from .wire import Packet, WireError, decode

DEFAULT_POSE_PORT = 47001
DEFAULT_SENSOR_PORT = 47002
DEFAULT_ACTUATION_PORT = 47003

_SEQ_MOD = 2**32
_SEQ_HALF = 2**31


def seq_is_newer(seq: int, last_seq: int | None) -> bool:
    """True iff seq is ahead of last_seq in the wraparound window [1, 2^31)."""
    if last_seq is None:
        return True
    return 1 <= (seq - last_seq) % _SEQ_MOD < _SEQ_HALF


def endpoint_recv(data: bytes, last_seq: int | None) -> tuple[Packet | None, int | None]:
    """Decode one datagram and apply the newest-wins acceptance rule.

    Returns (packet, new_last_seq) on accept and (None, last_seq) when the
    sequence number is stale; decode errors propagate to the caller.
    """
    pkt = decode(data)
    if seq_is_newer(pkt.seq, last_seq):
        return pkt, pkt.seq
    return None, last_seq


@dataclass
class StreamReceiver:
    """Stateful wrapper around endpoint_recv with drop accounting."""

    last_seq: int | None = None
    accepted: int = 0
    stale_dropped: int = 0
    decode_errors: int = 0

    def offer(self, data: bytes) -> Packet | None:
        try:
            pkt, self.last_seq = endpoint_recv(data, self.last_seq)
        except WireError:
            self.decode_errors += 1
            raise
        if pkt is None:
            self.stale_dropped += 1
        else:
            self.accepted += 1
        return pkt


def open_udp_socket(bind_addr: tuple[str, int] | None = None) -> socket.socket:
    """Non-blocking UDP socket, optionally bound; raises OSError on bind failure."""
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sock.setblocking(False)
    if bind_addr is not None:
        sock.bind(bind_addr)
    return sock


@dataclass
class PollingEndpoint:
    """Drains a UDP socket and keeps the newest accepted packet per drain.

    Tolerates malformed datagrams (counted on the receiver) so a corrupted
    packet never takes the bridge down mid-run.
    """

    sock: socket.socket
    receiver: StreamReceiver = field(default_factory=StreamReceiver)
    latest: Packet | None = None
    latest_source: tuple[str, int] | None = None

    def drain(self) -> bool:
        """Pull everything pending; True if a fresh packet was accepted."""
        fresh = False
        while True:
            try:
                data, source = self.sock.recvfrom(65535)
            except BlockingIOError:
                return fresh
            except (ConnectionResetError, OSError):
                return fresh
            try:
                pkt = self.receiver.offer(data)
            except WireError:
                continue
            if pkt is not None:
                self.latest = pkt
                self.latest_source = source
                fresh = True
