import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import march_ray_to_rect
from vve.geoframe import FrameAnchor, LocalPose, geo_to_local, local_to_geo
from vve.virtualsensors import (
    GpsParams,
    RadarParams,
    gps_sample,
    radar_scan,
    ray_rect_intersect,
)
from vve.worldmodel import EgoFootprint, ObstacleSpec, World

ANCHOR = FrameAnchor(lat0=40.0, lon0=-83.0)
RADAR = RadarParams()
BOX = ObstacleSpec(id=1, x=25.0, y=0.0, heading=0.0, length=4.0, width=1.8)


def world_with(obstacles, ego=LocalPose(0.0, 0.0, 0.0, 5.0)):
    return World(ego_pose=ego, ego_footprint=EgoFootprint(), obstacles=tuple(obstacles))


def test_ray_hits_near_face():
    assert ray_rect_intersect((0.0, 0.0), (1.0, 0.0), BOX) == pytest.approx(23.0)


def test_ray_pointing_away_misses():
    assert ray_rect_intersect((0.0, 0.0), (-1.0, 0.0), BOX) is None


def test_ray_from_inside_reports_exit():
    assert ray_rect_intersect((25.0, 0.0), (1.0, 0.0), BOX) == pytest.approx(2.0)


def test_non_unit_direction_rejected():
    with pytest.raises(ValueError):
        ray_rect_intersect((0.0, 0.0), (1.0, 1.0), BOX)


@given(
    ox=st.floats(-10.0, 10.0),
    oy=st.floats(-10.0, 10.0),
    ray_angle=st.floats(-math.pi, math.pi),
    cx=st.floats(5.0, 25.0),
    cy=st.floats(-8.0, 8.0),
    heading=st.floats(-math.pi, math.pi),
    length=st.floats(1.0, 8.0),
    width=st.floats(1.0, 6.0),
)
@settings(max_examples=120, deadline=None)
def test_ray_distance_matches_marching_oracle(ox, oy, ray_angle, cx, cy, heading, length, width):
    rect = ObstacleSpec(id=1, x=cx, y=cy, heading=heading, length=length, width=width)
    direction = (math.cos(ray_angle), math.sin(ray_angle))
    got = ray_rect_intersect((ox, oy), direction, rect)
    assume(got is None or got < 49.0)  # keep hits inside the oracle's march range
    oracle = march_ray_to_rect((ox, oy), direction, (cx, cy, heading, length, width), t_max=50.0)
    if got is not None and oracle is None:
        # the 1 mm march can step over a grazing chord; verify it really is
        # sub-millimeter with a fine sweep around the reported hit, and skip
        t_fine = np.arange(max(got - 0.002, 0.0), got + 0.006, 1e-5)
        px = ox + t_fine * direction[0]
        py = oy + t_fine * direction[1]
        c, s = math.cos(heading), math.sin(heading)
        bx = c * (px - cx) + s * (py - cy)
        by = -s * (px - cx) + c * (py - cy)
        span = 1e-5 * np.count_nonzero(
            (np.abs(bx) <= length / 2.0) & (np.abs(by) <= width / 2.0)
        )
        assert span < 2e-3, "oracle missed a chord it should have sampled"
        assume(False)
    if got is None:
        assert oracle is None
    else:
        assert got == pytest.approx(oracle, abs=2e-3)


def test_boresight_detection_example():
    dets = radar_scan(world_with([BOX]), ego_velocity=5.0, params=RADAR)
    assert len(dets) == 1
    det = dets[0]
    assert det.range == pytest.approx(19.2, abs=1e-9)
    assert det.azimuth == 0.0
    assert det.range_rate == pytest.approx(-5.0)
    # dense-ray oracle: the reported minimum range is the true minimum
    dense = []
    for i in range(10_001):
        a = -RADAR.fov_half_angle + 2.0 * RADAR.fov_half_angle * i / 10_000
        t = ray_rect_intersect((3.8, 0.0), (math.cos(a), math.sin(a)), BOX)
        if t is not None:
            dense.append(t)
    assert det.range == pytest.approx(min(dense), abs=1e-9)


def test_obstacle_outside_fov_ignored():
    bearing = math.pi / 4.0
    off_axis = ObstacleSpec(id=1, x=25.0 * math.cos(bearing), y=25.0 * math.sin(bearing),
                            heading=0.0, length=4.0, width=1.8)
    assert radar_scan(world_with([off_axis]), 5.0, RADAR) == []


def test_empty_world_empty_scan():
    assert radar_scan(world_with([]), 5.0, RADAR) == []


def test_detections_sorted_and_truncated():
    near = ObstacleSpec(id=1, x=20.0, y=1.0, heading=0.0, length=2.0, width=1.0)
    far = ObstacleSpec(id=2, x=60.0, y=-2.0, heading=0.0, length=4.0, width=2.0)
    dets = radar_scan(world_with([far, near]), 5.0, RADAR)
    assert [d.range for d in dets] == sorted(d.range for d in dets)
    assert len(dets) == 2
    capped = radar_scan(world_with([far, near]), 5.0,
                        RadarParams(max_detections=1))
    assert len(capped) == 1
    assert capped[0].range == dets[0].range


def test_occluded_obstacle_not_reported():
    front = ObstacleSpec(id=1, x=20.0, y=0.0, heading=0.0, length=2.0, width=3.0)
    hidden = ObstacleSpec(id=2, x=40.0, y=0.0, heading=0.0, length=2.0, width=1.0)
    dets = radar_scan(world_with([front, hidden]), 5.0, RADAR)
    assert len(dets) == 1
    assert dets[0].range == pytest.approx(20.0 - 1.0 - 3.8)


@given(
    cx=st.floats(10.0, 80.0),
    cy=st.floats(-6.0, 6.0),
    heading=st.floats(-math.pi, math.pi),
    v=st.floats(0.0, 20.0),
)
@settings(max_examples=150, deadline=None)
def test_scan_respects_contract(cx, cy, heading, v):
    obs = ObstacleSpec(id=1, x=cx, y=cy, heading=heading, length=4.0, width=2.0)
    dets = radar_scan(world_with([obs]), v, RADAR)
    ranges = [d.range for d in dets]
    assert ranges == sorted(ranges)
    for d in dets:
        assert 0.0 < d.range <= RADAR.max_range
        assert abs(d.azimuth) <= RADAR.fov_half_angle
        assert len(dets) <= RADAR.max_detections


@given(
    theta=st.floats(-math.pi, math.pi),
    tx=st.floats(-100.0, 100.0),
    ty=st.floats(-100.0, 100.0),
)
@settings(max_examples=100, deadline=None)
def test_scan_invariant_under_rigid_transform(theta, tx, ty):
    obstacles = [
        ObstacleSpec(id=1, x=25.0, y=0.5, heading=0.2, length=4.0, width=1.8),
        ObstacleSpec(id=2, x=50.0, y=-3.0, heading=-0.4, length=6.0, width=2.2),
    ]
    base = radar_scan(world_with(obstacles), 5.0, RADAR)

    c, s = math.cos(theta), math.sin(theta)

    def move(x, y):
        return c * x - s * y + tx, s * x + c * y + ty

    moved_obs = [
        ObstacleSpec(id=o.id, x=move(o.x, o.y)[0], y=move(o.x, o.y)[1],
                     heading=o.heading + theta, length=o.length, width=o.width)
        for o in obstacles
    ]
    ex, ey = move(0.0, 0.0)
    moved = radar_scan(world_with(moved_obs, ego=LocalPose(ex, ey, theta, 5.0)), 5.0, RADAR)
    assert len(moved) == len(base)
    for a, b in zip(base, moved):
        assert b.range == pytest.approx(a.range, abs=1e-6)
        assert b.azimuth == pytest.approx(a.azimuth, abs=1e-9)
        assert b.range_rate == pytest.approx(a.range_rate, abs=1e-6)


def test_approach_ranges_decrease_and_close():
    ranges = []
    for x in np.linspace(0.0, 15.0, 8):
        world = world_with([BOX], ego=LocalPose(float(x), 0.0, 0.0, 4.0))
        dets = radar_scan(world, 4.0, RADAR)
        assert len(dets) == 1
        assert dets[0].range_rate < 0.0
        ranges.append(dets[0].range)
    assert all(b < a for a, b in zip(ranges, ranges[1:]))


def test_gps_sigma_zero_is_exact():
    rng = np.random.default_rng(np.random.PCG64(1))
    pose = LocalPose(12.0, -7.0, 0.5, 3.0)
    fix = gps_sample(pose, ANCHOR, GpsParams(sigma_pos=0.0, sigma_heading=0.0), rng)
    exact = local_to_geo(pose, ANCHOR)
    assert fix == exact


def test_gps_same_seed_same_sequence():
    pose = LocalPose(1.0, 2.0, 0.1, 1.0)
    params = GpsParams(sigma_pos=0.02, sigma_heading=0.002, seed=9)
    rng1 = np.random.default_rng(np.random.PCG64(9))
    rng2 = np.random.default_rng(np.random.PCG64(9))
    seq1 = [gps_sample(pose, ANCHOR, params, rng1) for _ in range(50)]
    seq2 = [gps_sample(pose, ANCHOR, params, rng2) for _ in range(50)]
    assert seq1 == seq2


def test_gps_noise_statistics():
    pose = LocalPose(5.0, 5.0, 0.0, 2.0)
    params = GpsParams(sigma_pos=0.02, sigma_heading=0.002, seed=0)
    rng = np.random.default_rng(np.random.PCG64(1234))
    xs, ys = [], []
    for _ in range(10_000):
        fix = gps_sample(pose, ANCHOR, params, rng)
        local = geo_to_local(fix, ANCHOR)
        xs.append(local.x - pose.x)
        ys.append(local.y - pose.y)
    assert abs(np.std(xs) - 0.02) < 0.002
    assert abs(np.std(ys) - 0.02) < 0.002


def test_radar_params_validation():
    with pytest.raises(ValueError):
        RadarParams(n_rays=40)  # even: no boresight ray
    with pytest.raises(ValueError):
        RadarParams(fov_half_angle=2.0)
    with pytest.raises(ValueError):
        GpsParams(sigma_pos=-0.1)
