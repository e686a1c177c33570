"""Per-tick run records and their CSV serialization.

The log is plain CSV with a fixed header, preceded by one comment line
carrying run metadata (path length, tick period, stop threshold) so that
metrics can be recomputed from the file alone. Floats are written with
shortest-repr formatting, which round-trips exactly: metrics computed from
a re-read file equal metrics from the in-memory records, and identical runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path as FilePath

META_PREFIX = "# vve-log v1"

COLUMNS = [
    "tick", "t", "x", "y", "heading", "v", "steer", "lat", "lon",
    "nearest_range", "e_lat", "s_on_path", "mode",
    "steer_cmd", "throttle", "brake", "collision",
]

NO_DETECTION = -1.0


@dataclass(frozen=True)
class LogRecord:
    tick: int
    t: float
    x: float
    y: float
    heading: float
    v: float
    steer: float
    lat: float
    lon: float
    nearest_range: float     # NO_DETECTION when the radar saw nothing
    e_lat: float
    s_on_path: float
    mode: str
    steer_cmd: float
    throttle: float
    brake: float
    collision: bool


@dataclass(frozen=True)
class RunMeta:
    path_length: float
    dt: float
    v_stop_eps: float


@dataclass(frozen=True)
class RunResult:
    records: tuple[LogRecord, ...]
    meta: RunMeta


def write_log(path: str | FilePath, result: RunResult) -> None:
    meta = result.meta
    with open(path, "w", newline="") as fh:
        fh.write(
            f"{META_PREFIX} path_length={meta.path_length!r} dt={meta.dt!r} "
            f"v_stop_eps={meta.v_stop_eps!r}\n"
        )
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        f = lambda v: repr(float(v))  # noqa: E731 - shortest round-tripping form
        for r in result.records:
            writer.writerow([
                r.tick, f(r.t), f(r.x), f(r.y), f(r.heading), f(r.v),
                f(r.steer), f(r.lat), f(r.lon), f(r.nearest_range),
                f(r.e_lat), f(r.s_on_path), r.mode, f(r.steer_cmd),
                f(r.throttle), f(r.brake), int(r.collision),
            ])


def read_log(path: str | FilePath) -> RunResult:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith(META_PREFIX):
            raise ValueError(f"{path}: missing log metadata line")
        meta_fields = dict(
            item.split("=", 1) for item in first[len(META_PREFIX):].split()
        )
        meta = RunMeta(
            path_length=float(meta_fields["path_length"]),
            dt=float(meta_fields["dt"]),
            v_stop_eps=float(meta_fields["v_stop_eps"]),
        )
        reader = csv.reader(fh)
        header = next(reader)
        if header != COLUMNS:
            raise ValueError(f"{path}: unexpected log header {header}")
        records = []
        for row in reader:
            records.append(LogRecord(
                tick=int(row[0]), t=float(row[1]), x=float(row[2]), y=float(row[3]),
                heading=float(row[4]), v=float(row[5]), steer=float(row[6]),
                lat=float(row[7]), lon=float(row[8]), nearest_range=float(row[9]),
                e_lat=float(row[10]), s_on_path=float(row[11]), mode=row[12],
                steer_cmd=float(row[13]), throttle=float(row[14]), brake=float(row[15]),
                collision=bool(int(row[16])),
            ))
    return RunResult(records=tuple(records), meta=meta)
