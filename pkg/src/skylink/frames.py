"""Rotation algebra for the inertial (ENU), body (FLU) and camera (FLU) frames.

Euler convention
----------------
All attitude triples (UAV attitude in the inertial frame, gimbal attitude in
the body frame) use the intrinsic Z-Y-X sequence: yaw about z, then pitch
about the new y, then roll about the new x.

* yaw is positive counter-clockwise seen from above (x toward y),
* pitch is positive nose-up, so a gimbal pitch of -90 deg looks straight down,
* roll is a right-handed rotation about the forward axis.

:func:`rotation_from_euler` returns the *passive* matrix that maps
parent-frame coordinates into child-frame coordinates, e.g. ``p_c = R_pb @ p_b``.
The reverse direction is the transpose.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FrameTag",
    "EulerAngles",
    "wrap_angle",
    "rotation_from_euler",
    "euler_from_rotation",
    "inverse",
    "rotate",
    "is_rotation",
]

ORTHO_TOL = 1e-12
GIMBAL_LOCK_TOL = 1e-6


class FrameTag(enum.Enum):
    INERTIAL = "inertial"
    BODY = "body"
    CAMERA = "camera"


def wrap_angle(angle):
    """Wrap an angle (scalar or array) into (-pi, pi].

    Values already inside the interval are returned bit-for-bit.
    """
    a = np.asarray(angle, dtype=float)
    wrapped = np.mod(a + np.pi, 2.0 * np.pi) - np.pi
    # mod lands on -pi for odd multiples of pi; the half-open interval wants +pi
    wrapped = np.where(wrapped <= -np.pi, wrapped + 2.0 * np.pi, wrapped)
    wrapped = np.where((a > -np.pi) & (a <= np.pi), a, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class EulerAngles:
    """Roll, pitch and yaw in radians, normalized to (-pi, pi]."""

    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        for name in ("roll", "pitch", "yaw"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, wrap_angle(value))

    @classmethod
    def from_degrees(cls, roll=0.0, pitch=0.0, yaw=0.0) -> "EulerAngles":
        return cls(math.radians(roll), math.radians(pitch), math.radians(yaw))

    def as_degrees(self) -> tuple[float, float, float]:
        return math.degrees(self.roll), math.degrees(self.pitch), math.degrees(self.yaw)

    def as_array(self) -> np.ndarray:
        return np.array([self.roll, self.pitch, self.yaw])


def _rx(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_from_euler(angles: EulerAngles) -> np.ndarray:
    """Passive rotation taking parent-frame coordinates into the child frame.

    The child axes expressed in the parent frame are the columns of
    ``Rz(yaw) @ Ry(-pitch) @ Rx(roll)``; the returned matrix is its transpose.
    Pitch enters with a minus sign because positive pitch is nose-up while a
    right-handed turn about the FLU y (left) axis dips the nose.
    """
    axes = _rz(angles.yaw) @ _ry(-angles.pitch) @ _rx(angles.roll)
    return axes.T


def euler_from_rotation(R: np.ndarray) -> tuple[EulerAngles, bool]:
    """Recover the Euler triple from a matrix built by :func:`rotation_from_euler`.

    Returns ``(angles, gimbal_locked)``. Near ``|pitch| = pi/2`` roll and yaw
    are not separable; the flag is set, roll is reported as 0 and the whole
    residual heading is folded into yaw.
    """
    axes = np.asarray(R, dtype=float).T
    sin_pitch = float(np.clip(axes[2, 0], -1.0, 1.0))
    pitch = math.asin(sin_pitch)
    if math.sqrt(axes[0, 0] ** 2 + axes[1, 0] ** 2) < GIMBAL_LOCK_TOL:
        yaw = math.atan2(-axes[0, 1], axes[1, 1])
        return EulerAngles(0.0, pitch, yaw), True
    yaw = math.atan2(axes[1, 0], axes[0, 0])
    roll = math.atan2(axes[2, 1], axes[2, 2])
    return EulerAngles(roll, pitch, yaw), False


def inverse(R: np.ndarray) -> np.ndarray:
    return np.asarray(R, dtype=float).T.copy()


def rotate(R: np.ndarray, v) -> np.ndarray:
    return np.asarray(R, dtype=float) @ np.asarray(v, dtype=float)


def is_rotation(R: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    """True when ``R`` is orthonormal with determinant +1 to within ``tol``."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    if np.max(np.abs(R.T @ R - np.eye(3))) > tol:
        return False
    return abs(np.linalg.det(R) - 1.0) <= tol
