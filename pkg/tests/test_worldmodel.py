import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rects_share_point
from vve.geoframe import LocalPose
from vve.worldmodel import (
    EgoFootprint,
    ObstacleSpec,
    World,
    ego_corners,
    footprints_intersect,
    obstacle_corners,
    rects_overlap,
    set_ego_pose,
)


def make_world(ego=LocalPose(0.0, 0.0, 0.0, 0.0), obstacles=()):
    return World(ego_pose=ego, ego_footprint=EgoFootprint(), obstacles=tuple(obstacles))


coords = st.floats(min_value=-50.0, max_value=50.0)
angles = st.floats(min_value=-math.pi, max_value=math.pi)
sizes = st.floats(min_value=0.5, max_value=10.0)


def rect_strategy(id_=1):
    return st.builds(
        lambda x, y, h, l, w: ObstacleSpec(id=id_, x=x, y=y, heading=h, length=l, width=w),
        coords, coords, angles, sizes, sizes,
    )


def test_axis_aligned_corner_example():
    spec = ObstacleSpec(id=1, x=25.0, y=0.0, heading=0.0, length=4.0, width=1.8)
    corners = obstacle_corners(spec)
    expected = [(23.0, -0.9), (27.0, -0.9), (27.0, 0.9), (23.0, 0.9)]
    for got, want in zip(corners, expected):
        assert got == pytest.approx(want)


def test_quarter_turn_swaps_extents():
    spec = ObstacleSpec(id=1, x=0.0, y=0.0, heading=math.pi / 2.0, length=4.0, width=2.0)
    xs = [c[0] for c in obstacle_corners(spec)]
    ys = [c[1] for c in obstacle_corners(spec)]
    assert max(xs) - min(xs) == pytest.approx(2.0)
    assert max(ys) - min(ys) == pytest.approx(4.0)


@given(rect_strategy())
@settings(max_examples=200)
def test_corner_centroid_is_center(spec):
    corners = obstacle_corners(spec)
    cx = sum(c[0] for c in corners) / 4.0
    cy = sum(c[1] for c in corners) / 4.0
    assert cx == pytest.approx(spec.x, abs=1e-12)
    assert cy == pytest.approx(spec.y, abs=1e-12)


@given(rect_strategy())
@settings(max_examples=200)
def test_corners_are_ccw(spec):
    corners = obstacle_corners(spec)
    area2 = sum(
        corners[i][0] * corners[(i + 1) % 4][1] - corners[(i + 1) % 4][0] * corners[i][1]
        for i in range(4)
    )
    assert area2 > 0.0  # positive signed area = counter-clockwise


def test_set_ego_pose_semantics():
    world = make_world(obstacles=[ObstacleSpec(1, 10.0, 0.0, 0.0, 4.0, 2.0)])
    w1 = set_ego_pose(world, LocalPose(0.0, 0.0, 0.0, 0.0))
    assert (w1.ego_pose.x, w1.ego_pose.y, w1.ego_pose.heading) == (0.0, 0.0, 0.0)
    w2 = set_ego_pose(set_ego_pose(world, LocalPose(1.0, 1.0, 0.1, 0.0)),
                      LocalPose(2.0, 2.0, 0.2, 0.0))
    assert w2.ego_pose.x == 2.0  # last write wins
    assert len(w2.obstacles) == len(world.obstacles)


def test_disjoint_and_containment():
    far = make_world(obstacles=[ObstacleSpec(1, 25.0, 0.0, 0.0, 4.0, 1.8)])
    assert footprints_intersect(far) is False
    on_top = make_world(obstacles=[ObstacleSpec(1, 1.4, 0.0, 0.0, 10.0, 6.0)])
    assert footprints_intersect(on_top) is True


def test_edge_contact_counts_as_collision():
    # ego footprint reaches x = wheelbase + front_overhang = 3.8; obstacle
    # rear face placed exactly there
    spec = ObstacleSpec(id=1, x=5.8, y=0.0, heading=0.0, length=4.0, width=1.9)
    world = make_world(obstacles=[spec])
    assert footprints_intersect(world) is True
    ego = (1.4, 0.0, 0.0, 4.8, 1.9)  # center/heading/size of the default footprint
    assert rects_share_point(ego, (5.8, 0.0, 0.0, 4.0, 1.9)) is True
    # one millimeter of gap separates them
    apart = make_world(obstacles=[ObstacleSpec(1, 5.801, 0.0, 0.0, 4.0, 1.9)])
    assert footprints_intersect(apart) is False
    assert rects_share_point(ego, (5.801, 0.0, 0.0, 4.0, 1.9)) is False


@pytest.mark.parametrize("obstacle,expected", [
    (ObstacleSpec(1, 10.0, 0.0, 0.0, 4.0, 2.0), False),
    (ObstacleSpec(1, 4.0, 0.0, 0.5, 4.0, 2.0), True),
    (ObstacleSpec(1, 0.0, 3.0, 0.0, 4.0, 2.0), False),
    (ObstacleSpec(1, 0.0, 2.0, 1.0, 6.0, 2.0), True),
])
def test_overlap_agrees_with_sampling_oracle(obstacle, expected):
    world = make_world(obstacles=[obstacle])
    assert footprints_intersect(world) is expected
    ego = (1.4, 0.0, 0.0, 4.8, 1.9)
    rect = (obstacle.x, obstacle.y, obstacle.heading, obstacle.length, obstacle.width)
    assert rects_share_point(ego, rect) is expected


@given(rect_strategy(1), rect_strategy(2))
@settings(max_examples=200)
def test_overlap_is_symmetric(a, b):
    ca, cb = obstacle_corners(a), obstacle_corners(b)
    assert rects_overlap(ca, cb) == rects_overlap(cb, ca)


@given(rect_strategy(1), rect_strategy(2), coords, coords, angles)
@settings(max_examples=200)
def test_overlap_invariant_under_rigid_transform(a, b, tx, ty, theta):
    def moved(spec):
        c, s = math.cos(theta), math.sin(theta)
        return ObstacleSpec(id=spec.id, x=c * spec.x - s * spec.y + tx,
                            y=s * spec.x + c * spec.y + ty,
                            heading=spec.heading + theta,
                            length=spec.length, width=spec.width)

    before = rects_overlap(obstacle_corners(a), obstacle_corners(b))
    after = rects_overlap(obstacle_corners(moved(a)), obstacle_corners(moved(b)))
    assert before == after


def test_setting_pose_never_touches_obstacles():
    world = make_world(obstacles=[ObstacleSpec(1, 10.0, 0.0, 0.0, 4.0, 2.0),
                                  ObstacleSpec(2, -5.0, 3.0, 0.4, 2.0, 1.0)])
    for pose in (LocalPose(5.0, 5.0, 1.0, 2.0), LocalPose(-3.0, 0.0, -2.0, 0.0)):
        world = set_ego_pose(world, pose)
        assert {o.id for o in world.obstacles} == {1, 2}


def test_duplicate_obstacle_ids_rejected():
    with pytest.raises(ValueError):
        make_world(obstacles=[ObstacleSpec(1, 0.0, 0.0, 0.0, 1.0, 1.0),
                              ObstacleSpec(1, 5.0, 0.0, 0.0, 1.0, 1.0)])


def test_ego_corners_follow_pose():
    world = make_world(ego=LocalPose(10.0, 5.0, math.pi / 2.0, 0.0))
    xs = [c[0] for c in ego_corners(world)]
    ys = [c[1] for c in ego_corners(world)]
    # rear axle at (10, 5), nose pointing +y: rectangle spans y in [4, 8.8]
    assert min(ys) == pytest.approx(4.0)
    assert max(ys) == pytest.approx(8.8)
    assert min(xs) == pytest.approx(10.0 - 0.95)
    assert max(xs) == pytest.approx(10.0 + 0.95)
