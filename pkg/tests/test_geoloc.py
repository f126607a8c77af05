import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pose
from skylink.frames import EulerAngles
from skylink.geoloc import (
    BearingPair,
    CameraFov,
    GeometryError,
    UavPose,
    bearings_range_to_camera_point,
    camera_to_inertial,
    geometric_solve,
    inertial_to_camera,
    pixel_to_bearings,
)
from skylink.sensing import Detection

RIGHT = CameraFov(math.pi / 2, math.pi / 2)


def test_center_pixel_gives_zero_bearings(fov):
    b = pixel_to_bearings(0.0, 0.0, fov)
    assert (b.azimuth, b.elevation) == (0.0, 0.0)


def test_fov_edge_azimuth():
    # tan(pi/4) = 1, so u = 1 maps to -atan(1)
    assert pixel_to_bearings(1.0, 0.0, RIGHT).azimuth == pytest.approx(-math.pi / 4, abs=1e-15)


def test_half_offsets_signs():
    b = pixel_to_bearings(0.5, -0.5, RIGHT)
    assert b.azimuth == pytest.approx(-0.4636476090008061, abs=1e-12)
    assert b.elevation == pytest.approx(0.4636476090008061, abs=1e-12)


@pytest.mark.parametrize("u, v", [(1.01, 0.0), (0.0, -1.5), (float("nan"), 0.0), (0.0, float("inf"))])
def test_pixel_out_of_range_rejected(u, v, fov):
    with pytest.raises(GeometryError):
        pixel_to_bearings(u, v, fov)


@pytest.mark.parametrize("h, v", [(0.0, 0.5), (math.pi, 0.5), (0.5, -0.1)])
def test_degenerate_fov_rejected(h, v):
    with pytest.raises(GeometryError):
        CameraFov(h, v)


def test_rear_hemisphere_bearing_rejected():
    with pytest.raises(GeometryError):
        BearingPair(math.pi / 2, 0.0)


def test_azimuth_strictly_decreasing_in_u(fov):
    us = np.linspace(-1, 1, 201)
    az = [pixel_to_bearings(u, 0.0, fov).azimuth for u in us]
    assert np.all(np.diff(az) < 0)


def test_boresight_camera_point():
    np.testing.assert_array_equal(bearings_range_to_camera_point(BearingPair(0, 0), 100.0), [100, 0, 0])


def test_forty_five_degree_camera_point():
    p = bearings_range_to_camera_point(BearingPair(math.pi / 4, 0.0), math.sqrt(2))
    np.testing.assert_allclose(p, [1.0, 1.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("r", [0.0, -3.0, float("inf")])
def test_nonpositive_range_rejected(r):
    with pytest.raises(GeometryError):
        bearings_range_to_camera_point(BearingPair(0, 0), r)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(-1.5, 1.5),
    st.floats(-1.5, 1.5),
    st.floats(1e-3, 1e5),
)
def test_camera_point_has_range_norm(a, e, r):
    p = bearings_range_to_camera_point(BearingPair(a, e), r)
    assert abs(np.linalg.norm(p) - r) <= 1e-9 * r
    assert p[0] > 0


def test_identity_chain_translates_only():
    pose = UavPose([0, 0, 7.5])
    np.testing.assert_array_equal(camera_to_inertial([42.0, 0, 0], pose), [42.0, 0, 7.5])


def test_nadir_gimbal_points_down():
    pose = UavPose([0, 0, 7.5], gimbal=EulerAngles(0, -math.pi / 2, 0))
    np.testing.assert_allclose(camera_to_inertial([100.0, 0, 0], pose), [0, 0, -92.5], atol=1e-12)


def test_forward_inverse_chain_round_trip(rng):
    for _ in range(200):
        pose = random_pose(rng)
        p = rng.uniform(-500, 500, 3)
        np.testing.assert_allclose(camera_to_inertial(inertial_to_camera(p, pose), pose), p, atol=1e-9)


def test_nadir_boresight_solve_lands_below_uav(fov):
    pose = UavPose([0, 0, 7.5], gimbal=EulerAngles(0, -math.pi / 2, 0))
    np.testing.assert_allclose(geometric_solve(Detection(0, 0), 7.5, fov, pose), [0, 0, 0], atol=1e-12)


def test_solve_preserves_range(rng, fov):
    for _ in range(500):
        pose = random_pose(rng)
        det = Detection(*rng.uniform(-1, 1, 2))
        r = rng.uniform(1.0, 3000.0)
        p = geometric_solve(det, r, fov, pose)
        assert abs(np.linalg.norm(p - pose.position) / r - 1.0) <= 1e-9


def test_uav_pose_rejects_negative_altitude():
    with pytest.raises(GeometryError):
        UavPose([0, 0, -1.0])
