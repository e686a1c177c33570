"""Aggregate run metrics: tracking quality, stop gap, collision outcome."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .runlog import NO_DETECTION, RunResult


@dataclass(frozen=True)
class Metrics:
    max_abs_cross_track: float
    rms_cross_track: float
    min_radar_range: float   # NO_DETECTION if the radar never reported
    final_gap: float         # nearest range at the final tick, NO_DETECTION if none
    collided: bool
    stopped: bool            # speed below the stop threshold at the end
    path_completion: float   # fraction of the path length reached


def compute_metrics(result: RunResult) -> Metrics:
    records = result.records
    if not records:
        raise ValueError("cannot compute metrics of an empty log")
    e = [r.e_lat for r in records]
    ranges = [r.nearest_range for r in records if r.nearest_range != NO_DETECTION]
    return Metrics(
        max_abs_cross_track=max(abs(v) for v in e),
        rms_cross_track=math.sqrt(sum(v * v for v in e) / len(e)),
        min_radar_range=min(ranges) if ranges else NO_DETECTION,
        final_gap=records[-1].nearest_range,
        collided=any(r.collision for r in records),
        stopped=records[-1].v < result.meta.v_stop_eps,
        path_completion=max(r.s_on_path for r in records) / result.meta.path_length,
    )


def format_metrics(metrics: Metrics) -> str:
    """key=value lines, one metric per line, stable order."""
    lines = [
        f"max_abs_cross_track={metrics.max_abs_cross_track:.6f}",
        f"rms_cross_track={metrics.rms_cross_track:.6f}",
        f"min_radar_range={metrics.min_radar_range:.6f}",
        f"final_gap={metrics.final_gap:.6f}",
        f"collided={str(metrics.collided).lower()}",
        f"stopped={str(metrics.stopped).lower()}",
        f"path_completion={metrics.path_completion:.6f}",
    ]
    return "\n".join(lines)
