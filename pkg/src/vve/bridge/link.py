"""Deterministic link impairment: seeded loss, latency and jitter.

Two forms of the same model:

* :func:`link_impair` transforms a whole timed stream offline (used by the
  lockstep tests and anywhere reproducibility must be byte-exact), and
* :class:`ImpairedSender` applies identical per-packet draws to live UDP
  sends, holding delayed datagrams in a queue that the owning loop flushes.

Per packet, in input order: one uniform draw decides loss; survivors get a
second uniform draw for jitter. Parameters are expressed in simulation
time; live senders scale wall delays by the pace factor so behavior does
not depend on how fast the run is paced.
"""

from __future__ import annotations

import heapq
import socket
import time
from dataclasses import dataclass
from typing import TypeVar

import numpy as np

T = TypeVar("T")


@dataclass(frozen=True)
class LinkParams:
    loss_prob: float = 0.0
    latency_ms: float = 0.0
    jitter_ms: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.loss_prob <= 1.0):
            raise ValueError(f"loss_prob {self.loss_prob} outside [0, 1]")
        if self.latency_ms < 0.0 or self.jitter_ms < 0.0:
            raise ValueError("latency_ms and jitter_ms must be >= 0")


def link_impair(stream: list[tuple[float, T]], params: LinkParams) -> list[tuple[float, T]]:
    """Apply loss and delay to a list of (send_time_s, payload) pairs.

    Input timestamps must be non-decreasing. The output is ordered by
    delivery time (ties keep send order), so jitter may reorder packets.
    """
    times = [t for t, _ in stream]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("input stream timestamps must be non-decreasing")
    rng = np.random.default_rng(np.random.PCG64(params.seed))
    delivered: list[tuple[float, int, T]] = []
    for index, (t_send, payload) in enumerate(stream):
        if rng.random() < params.loss_prob:
            continue
        delay = params.latency_ms / 1000.0 + rng.random() * params.jitter_ms / 1000.0
        delivered.append((t_send + delay, index, payload))
    delivered.sort(key=lambda item: (item[0], item[1]))
    return [(t, payload) for t, _, payload in delivered]


class ImpairedSender:
    """UDP sender that drops/delays datagrams with the stream's seeded draws.

    Delayed datagrams wait in a heap; the owning loop calls flush() often
    (every tick) to release anything due. With pace > 1 the wall delay is
    latency/pace so the delay measured in simulation time stays constant.
    """

    def __init__(self, sock: socket.socket, params: LinkParams, pace: float = 1.0) -> None:
        self.sock = sock
        self.params = params
        self.pace = pace
        self._rng = np.random.default_rng(np.random.PCG64(params.seed))
        self._pending: list[tuple[float, int, bytes, tuple[str, int]]] = []
        self._counter = 0
        self.sent = 0
        self.dropped = 0

    def send(self, data: bytes, addr: tuple[str, int]) -> None:
        if self._rng.random() < self.params.loss_prob:
            self.dropped += 1
            return
        delay_s = (self.params.latency_ms / 1000.0
                   + self._rng.random() * self.params.jitter_ms / 1000.0) / self.pace
        if delay_s <= 0.0:
            self._transmit(data, addr)
            return
        heapq.heappush(self._pending, (time.monotonic() + delay_s, self._counter, data, addr))
        self._counter += 1

    def flush(self, now: float | None = None) -> None:
        if now is None:
            now = time.monotonic()
        while self._pending and self._pending[0][0] <= now:
            _, _, data, addr = heapq.heappop(self._pending)
            self._transmit(data, addr)

    def _transmit(self, data: bytes, addr: tuple[str, int]) -> None:
        try:
            self.sock.sendto(data, addr)
            self.sent += 1
        except OSError:
            self.dropped += 1
