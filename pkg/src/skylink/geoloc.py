"""Single-frame geometric localization: pixel error + range -> inertial position.

Pixel convention: ``u > 0`` means the target sits right of the image centre,
``v > 0`` means below it. Both map to negative camera angles because right is
-y and down is -z in the camera FLU frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import EulerAngles, rotation_from_euler

__all__ = [
    "CameraFov",
    "BearingPair",
    "UavPose",
    "GeometryError",
    "pixel_to_bearings",
    "bearings_range_to_camera_point",
    "camera_to_inertial",
    "inertial_to_camera",
    "geometric_solve",
]


class GeometryError(ValueError):
    """Raised for inputs outside the camera's valid measurement domain."""


@dataclass(frozen=True)
class CameraFov:
    """Full horizontal and vertical field of view, radians."""

    horizontal: float
    vertical: float

    def __post_init__(self):
        for name in ("horizontal", "vertical"):
            value = float(getattr(self, name))
            if not (0.0 < value < math.pi):
                raise GeometryError(f"fov {name} must lie in (0, pi), got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_degrees(cls, horizontal: float, vertical: float) -> "CameraFov":
        return cls(math.radians(horizontal), math.radians(vertical))

    @property
    def tan_half_h(self) -> float:
        return math.tan(self.horizontal / 2.0)

    @property
    def tan_half_v(self) -> float:
        return math.tan(self.vertical / 2.0)


@dataclass(frozen=True)
class BearingPair:
    azimuth: float
    elevation: float

    def __post_init__(self):
        for name in ("azimuth", "elevation"):
            value = float(getattr(self, name))
            if not (abs(value) < math.pi / 2):
                raise GeometryError(
                    f"{name} must satisfy |{name}| < pi/2 (front hemisphere), got {value!r}"
                )
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class UavPose:
    """UAV position (ENU, z is altitude), body attitude and gimbal attitude."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: EulerAngles = field(default_factory=EulerAngles)
    gimbal: EulerAngles = field(default_factory=EulerAngles)

    def __post_init__(self):
        p = np.array(self.position, dtype=float).reshape(3)
        if not np.all(np.isfinite(p)):
            raise GeometryError("UAV position must be finite")
        if p[2] < 0.0:
            raise GeometryError(f"UAV altitude must be >= 0, got {p[2]!r}")
        p.setflags(write=False)
        object.__setattr__(self, "position", p)

    @property
    def altitude(self) -> float:
        return float(self.position[2])

    def with_gimbal(self, gimbal: EulerAngles) -> "UavPose":
        return UavPose(self.position, self.attitude, gimbal)

    def camera_rotation(self) -> np.ndarray:
        """Matrix taking inertial offsets into the camera frame (gimbal @ body)."""
        return rotation_from_euler(self.gimbal) @ rotation_from_euler(self.attitude)


def pixel_to_bearings(u: float, v: float, fov: CameraFov) -> BearingPair:
    u, v = float(u), float(v)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise GeometryError(f"pixel errors must be finite, got ({u!r}, {v!r})")
    if abs(u) > 1.0 or abs(v) > 1.0:
        raise GeometryError(f"pixel errors must lie in [-1, 1], got ({u!r}, {v!r})")
    azimuth = -math.atan(u * fov.tan_half_h)
    elevation = -math.atan(v * fov.tan_half_v)
    return BearingPair(azimuth, elevation)


def bearings_range_to_camera_point(b: BearingPair, r: float) -> np.ndarray:
    r = float(r)
    if not (r > 0.0 and math.isfinite(r)):
        raise GeometryError(f"range must be positive and finite, got {r!r}")
    direction = np.array([1.0, math.tan(b.azimuth), math.tan(b.elevation)])
    return direction * (r / np.linalg.norm(direction))


def camera_to_inertial(p_c, pose: UavPose) -> np.ndarray:
    return pose.position + pose.camera_rotation().T @ np.asarray(p_c, dtype=float)


def inertial_to_camera(p, pose: UavPose) -> np.ndarray:
    return pose.camera_rotation() @ (np.asarray(p, dtype=float) - pose.position)


def geometric_solve(det, r: float, fov: CameraFov, pose: UavPose) -> np.ndarray:
    """Single-shot target position from a detection and the datalink range.

    ``det`` is anything with ``u`` and ``v`` attributes (normally a
    :class:`skylink.sensing.Detection`).
    """
    b = pixel_to_bearings(det.u, det.v, fov)
    return camera_to_inertial(bearings_range_to_camera_point(b, r), pose)
