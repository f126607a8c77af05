import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from skylink.frames import (
    EulerAngles,
    FrameTag,
    euler_from_rotation,
    inverse,
    is_rotation,
    rotate,
    rotation_from_euler,
    wrap_angle,
)

angle = st.floats(-math.pi, math.pi, allow_nan=False)
safe_pitch = st.floats(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)


def test_zero_rotation_is_identity():
    np.testing.assert_array_equal(rotation_from_euler(EulerAngles()), np.eye(3))


def test_yaw_quarter_turn_sends_parent_x_to_child_minus_y():
    R = rotation_from_euler(EulerAngles(0.0, 0.0, math.pi / 2))
    expected = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    np.testing.assert_allclose(R, expected, atol=1e-15)
    np.testing.assert_allclose(rotate(R, [1, 0, 0]), [0, -1, 0], atol=1e-15)


def test_negative_pitch_looks_down():
    # camera x axis expressed in the parent frame is the first row of R
    R = rotation_from_euler(EulerAngles(0.0, -math.pi / 2, 0.0))
    np.testing.assert_allclose(R[0], [0, 0, -1], atol=1e-15)


def test_matches_scipy_passive_zyx():
    rng = np.random.default_rng(3)
    for _ in range(50):
        r, p, y = rng.uniform(-math.pi, math.pi, 3)
        p = p / 2
        # scipy intrinsic "ZYX" gives child axes in the parent frame; our pitch is nose-up
        axes = Rotation.from_euler("ZYX", [y, -p, r]).as_matrix()
        np.testing.assert_allclose(rotation_from_euler(EulerAngles(r, p, y)), axes.T, atol=1e-14)


@pytest.mark.parametrize(
    "raw, expected",
    [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi, math.pi), (1.5 * math.pi, -0.5 * math.pi)],
)
def test_wrap_angle_half_open_interval(raw, expected):
    assert wrap_angle(raw) == pytest.approx(expected, abs=1e-12)


def test_euler_normalized_and_finite():
    e = EulerAngles(2 * math.pi + 0.1, -math.pi, 0.0)
    assert e.roll == pytest.approx(0.1)
    assert e.pitch == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        EulerAngles(float("nan"), 0, 0)


def test_frame_tags():
    assert {t.value for t in FrameTag} == {"inertial", "body", "camera"}


@settings(max_examples=200, deadline=None)
@given(angle, angle, angle)
def test_rotation_invariants(r, p, y):
    R = rotation_from_euler(EulerAngles(r, p, y))
    assert is_rotation(R)
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
    np.testing.assert_array_equal(inverse(R), R.T)


@settings(max_examples=200, deadline=None)
@given(angle, safe_pitch, angle)
def test_euler_round_trip_away_from_gimbal_lock(r, p, y):
    e = EulerAngles(r, p, y)
    back, locked = euler_from_rotation(rotation_from_euler(e))
    assert not locked
    for a, b in ((back.roll, e.roll), (back.pitch, e.pitch), (back.yaw, e.yaw)):
        assert abs(wrap_angle(a - b)) < 1e-9


def test_gimbal_lock_is_flagged_and_reconstructs_matrix():
    e = EulerAngles(0.3, math.pi / 2, 1.1)
    R = rotation_from_euler(e)
    back, locked = euler_from_rotation(R)
    assert locked
    assert back.roll == 0.0
    np.testing.assert_allclose(rotation_from_euler(back), R, atol=1e-9)


def test_inverse_restores_random_vectors():
    rng = np.random.default_rng(11)
    for _ in range(20):
        e = EulerAngles(*rng.uniform(-math.pi, math.pi, 3))
        R = rotation_from_euler(e)
        vs = rng.normal(size=(100, 3)) * 100
        for v in vs:
            np.testing.assert_allclose(rotate(inverse(R), rotate(R, v)), v, atol=1e-12)


def test_rotate_is_isometric_and_linear():
    rng = np.random.default_rng(5)
    for _ in range(100):
        R = rotation_from_euler(EulerAngles(*rng.uniform(-math.pi, math.pi, 3)))
        u, v = rng.normal(size=(2, 3))
        a, b = rng.normal(size=2)
        assert np.linalg.norm(rotate(R, v)) == pytest.approx(np.linalg.norm(v), abs=1e-12)
        np.testing.assert_allclose(rotate(R, a * u + b * v), a * rotate(R, u) + b * rotate(R, v), atol=1e-12)


def test_is_rotation_rejects_reflection():
    assert not is_rotation(np.diag([1.0, 1.0, -1.0]))
    assert not is_rotation(np.eye(3) * 1.001)
