"""Simulated sensors (camera detector, datalink range) and the gimbal pointing loop."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .frames import EulerAngles, rotation_from_euler
from .geoloc import CameraFov, UavPose, inertial_to_camera

__all__ = [
    "Detection",
    "SensorNoise",
    "GimbalController",
    "project",
    "simulate_detection",
    "simulate_range",
    "gimbal_control_step",
    "point_gimbal_at",
    "RANGE_FLOOR",
]

logger = logging.getLogger(__name__)

RANGE_FLOOR = 1e-6


@dataclass(frozen=True)
class Detection:
    u: float
    v: float
    confidence: float = 1.0
    time: float = 0.0

    def __post_init__(self):
        u, v, c = float(self.u), float(self.v), float(self.confidence)
        if not (math.isfinite(u) and math.isfinite(v) and abs(u) <= 1.0 and abs(v) <= 1.0):
            raise ValueError(f"pixel errors must lie in [-1, 1], got ({u!r}, {v!r})")
        if not (0.0 <= c <= 1.0):
            raise ValueError(f"confidence must lie in [0, 1], got {c!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "confidence", c)
        object.__setattr__(self, "time", float(self.time))


@dataclass(frozen=True)
class SensorNoise:
    pixel_sigma: float = 0.0
    range_sigma: float = 0.0
    miss_probability: float = 0.0
    confidence_floor: float = 0.5
    seed: int = 0

    def __post_init__(self):
        for name in ("pixel_sigma", "range_sigma", "miss_probability", "confidence_floor"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be a non-negative number, got {value!r}")
            object.__setattr__(self, name, value)
        if self.miss_probability >= 1.0:
            raise ValueError("miss_probability must be < 1")
        if self.confidence_floor > 1.0:
            raise ValueError("confidence_floor must be <= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(int(self.seed))


@dataclass(frozen=True)
class GimbalController:
    """Proportional pixel-error centering with deadband and saturation.

    Gains are radians of gimbal motion per unit of normalized pixel error.
    Linearizing around the image centre, the per-step error contraction is
    ``1 - gain / tan(fov / 2)``, so the loop is stable for
    ``gain < 2 * tan(fov / 2)`` and non-oscillating for ``gain <= tan(fov / 2)``.
    ``yaw_limits=None`` leaves yaw free to wrap through +-pi.
    """

    gain_azimuth: float = 0.2
    gain_elevation: float = 0.2
    pitch_limits: tuple = (-math.pi / 2, math.pi / 6)
    yaw_limits: Optional[tuple] = None
    deadband: float = 0.0

    def __post_init__(self):
        if not (self.gain_azimuth > 0.0 and self.gain_elevation > 0.0):
            raise ValueError("controller gains must be positive")
        if self.deadband < 0.0:
            raise ValueError("deadband must be non-negative")
        for name in ("pitch_limits", "yaw_limits"):
            lim = getattr(self, name)
            if lim is None:
                continue
            lo, hi = (float(x) for x in lim)
            if not lo <= hi:
                raise ValueError(f"{name} must be ordered (min <= max), got {lim!r}")
            object.__setattr__(self, name, (lo, hi))

    @staticmethod
    def stability_bound(fov_half_angle: float) -> float:
        return 2.0 * math.tan(fov_half_angle)


def project(p_world, pose: UavPose, fov: CameraFov) -> Optional[tuple[float, float]]:
    """Normalized pixel error of a world point, or None when it is not visible."""
    xc, yc, zc = inertial_to_camera(p_world, pose)
    if xc <= 0.0:
        return None
    u = -(yc / xc) / fov.tan_half_h
    v = -(zc / xc) / fov.tan_half_v
    if abs(u) > 1.0 or abs(v) > 1.0:
        return None
    return float(u), float(v)


def simulate_detection(
    p_usv_true,
    pose: UavPose,
    fov: CameraFov,
    noise: SensorNoise,
    rng: np.random.Generator,
    time: float = 0.0,
) -> Optional[Detection]:
    uv = project(p_usv_true, pose, fov)
    if uv is None:
        return None
    if rng.random() < noise.miss_probability:
        return None
    u, v = uv
    if noise.pixel_sigma > 0.0:
        du, dv = rng.normal(0.0, noise.pixel_sigma, size=2)
        u = min(1.0, max(-1.0, u + du))
        v = min(1.0, max(-1.0, v + dv))
    confidence = rng.uniform(noise.confidence_floor, 1.0)
    return Detection(u, v, confidence, time)


def simulate_range(p_usv_true, p_uav, noise: SensorNoise, rng: np.random.Generator) -> float:
    true_range = float(np.linalg.norm(np.asarray(p_usv_true, float) - np.asarray(p_uav, float)))
    r = true_range
    if noise.range_sigma > 0.0:
        r += rng.normal(0.0, noise.range_sigma)
    if r < RANGE_FLOOR:
        logger.warning("simulated range %.3g m floored at %.1e m", r, RANGE_FLOOR)
        r = RANGE_FLOOR
    return r


def _clamp(value: float, limits) -> float:
    if limits is None:
        return value
    return min(limits[1], max(limits[0], value))


def gimbal_control_step(gimbal: EulerAngles, det: Detection, ctrl: GimbalController) -> EulerAngles:
    """One proportional step toward centering the detection.

    Right of centre (u > 0) needs a clockwise (negative) yaw, below centre
    (v > 0) needs a nose-down (negative) pitch.
    """
    if max(abs(det.u), abs(det.v)) <= ctrl.deadband:
        return gimbal
    yaw = _clamp(gimbal.yaw - ctrl.gain_azimuth * det.u, ctrl.yaw_limits)
    pitch = _clamp(gimbal.pitch - ctrl.gain_elevation * det.v, ctrl.pitch_limits)
    return EulerAngles(gimbal.roll, pitch, yaw)


def point_gimbal_at(p_world, pose: UavPose, roll: float = 0.0) -> EulerAngles:
    """Gimbal angles (in the body frame) that put ``p_world`` on the boresight."""
    d = rotation_from_euler(pose.attitude) @ (np.asarray(p_world, float) - pose.position)
    yaw = math.atan2(d[1], d[0])
    pitch = math.atan2(d[2], math.hypot(d[0], d[1]))
    return EulerAngles(roll, pitch, yaw)
