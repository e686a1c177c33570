#!/usr/bin/env python3
"""Regenerate the bundled scenarios in scenarios/.

The reference stop scenario is a ~200 m gently curved route (30 m straight,
100 m arc at R = 300 m, 70 m straight) with a parked vehicle across the lane
near the end. Waypoints are laid out in the local frame, converted to
geodetic around the anchor, and written the way a recorded GPS trace would
be: one row per meter with compass heading and speed columns.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from vve.geoframe import FrameAnchor, LocalPose, local_to_geo

ANCHOR = FrameAnchor(lat0=40.0, lon0=-83.0)

STRAIGHT_1 = 30.0
ARC_LEN = 100.0
ARC_RADIUS = 300.0
STRAIGHT_2 = 70.0
TOTAL = STRAIGHT_1 + ARC_LEN + STRAIGHT_2

OBSTACLE_S = 185.0
OBSTACLE_LENGTH = 4.6
OBSTACLE_WIDTH = 1.8

OUT_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def centerline(s: float) -> tuple[float, float, float]:
    """Local (x, y, heading) at arc length s along the designed route."""
    if s <= STRAIGHT_1:
        return s, 0.0, 0.0
    if s <= STRAIGHT_1 + ARC_LEN:
        phi = (s - STRAIGHT_1) / ARC_RADIUS
        x = STRAIGHT_1 + ARC_RADIUS * math.sin(phi)
        y = ARC_RADIUS * (1.0 - math.cos(phi))
        return x, y, phi
    phi1 = ARC_LEN / ARC_RADIUS
    x1 = STRAIGHT_1 + ARC_RADIUS * math.sin(phi1)
    y1 = ARC_RADIUS * (1.0 - math.cos(phi1))
    d = s - STRAIGHT_1 - ARC_LEN
    return x1 + d * math.cos(phi1), y1 + d * math.sin(phi1), phi1


def compass_deg(heading_rad: float) -> float:
    return (90.0 - math.degrees(heading_rad)) % 360.0


def write_reference_waypoints(path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lat_deg", "lon_deg", "heading_deg", "speed_mps"])
        n = int(TOTAL) + 1
        for i in range(n):
            s = TOTAL * i / (n - 1)
            x, y, heading = centerline(s)
            fix = local_to_geo(LocalPose(x, y, heading, 5.0), ANCHOR)
            writer.writerow([f"{fix.lat:.9f}", f"{fix.lon:.9f}",
                             f"{compass_deg(heading):.3f}", "5.0"])


def reference_stop_scenario() -> dict:
    ox, oy, oheading = centerline(OBSTACLE_S)
    ofix = local_to_geo(LocalPose(ox, oy, oheading, 0.0), ANCHOR)
    return {
        "name": "reference_stop",
        "anchor": {"lat0": ANCHOR.lat0, "lon0": ANCHOR.lon0},
        "waypoints_file": "reference_waypoints.csv",
        "v_target": 5.0,
        "obstacles": [
            {
                "id": 1,
                "lat": round(ofix.lat, 9),
                "lon": round(ofix.lon, 9),
                "heading_deg": round(compass_deg(oheading), 3),
                "length": OBSTACLE_LENGTH,
                "width": OBSTACLE_WIDTH,
            }
        ],
        # comfort-braking profile: gentle planned decel, firm tracking gains,
        # so the stop settles right at the standoff gap
        "guidance": {"d_safe": 5.0, "a_brake_plan": 1.2, "kp": 4.0, "ki": 0.3},
        "seed": 7,
        "max_duration": 120.0,
        "mode": "lockstep",
    }


def free_path_scenario() -> dict:
    waypoints = []
    for x in range(0, 101, 10):
        fix = local_to_geo(LocalPose(float(x), 0.0, 0.0, 5.0), ANCHOR)
        waypoints.append({
            "lat_deg": round(fix.lat, 9),
            "lon_deg": round(fix.lon, 9),
            "heading_deg": 90.0,
            "speed_mps": 5.0,
        })
    return {
        "name": "free_path",
        "anchor": {"lat0": ANCHOR.lat0, "lon0": ANCHOR.lon0},
        "waypoints": waypoints,
        "v_target": 5.0,
        "guidance": {"kp": 4.0, "ki": 0.3},
        "seed": 3,
        "max_duration": 60.0,
        "mode": "lockstep",
    }


def main() -> None:
    OUT_DIR.mkdir(exist_ok=True)
    write_reference_waypoints(OUT_DIR / "reference_waypoints.csv")
    for name, scenario in (
        ("reference_stop.json", reference_stop_scenario()),
        ("free_path.json", free_path_scenario()),
    ):
        with open(OUT_DIR / name, "w") as fh:
            json.dump(scenario, fh, indent=2)
            fh.write("\n")
    print(f"wrote scenarios to {OUT_DIR}")


if __name__ == "__main__":
    main()
