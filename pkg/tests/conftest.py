from pathlib import Path

import pytest

from vve.geoframe import FrameAnchor, LocalPose, local_to_geo
from vve.guidance import build_path

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def anchor() -> FrameAnchor:
    return FrameAnchor(lat0=40.0, lon0=-83.0)


def make_local_path(anchor: FrameAnchor, xy_points, ds: float = 0.5):
    """Build a Path from local-frame (x, y) waypoints through the geo layer."""
    waypoints = [local_to_geo(LocalPose(x, y, 0.0, 0.0), anchor) for x, y in xy_points]
    return build_path(waypoints, anchor, ds=ds)


@pytest.fixture
def straight_path(anchor):
    """100 m straight path along +x at y = 0."""
    return make_local_path(anchor, [(x, 0.0) for x in range(0, 101, 25)])


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR
