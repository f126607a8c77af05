"""Stationary-target EKF over range/azimuth/elevation/altitude measurements,
plus the mean-filter and no-filter baselines it is benchmarked against.

State is the target position in the inertial ENU frame. The process model is
the identity (stationary target) and the process noise grows with the gap
time ``T`` between valid measurements as ``I * sigma_a * T**4 / 3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .frames import wrap_angle
from .geoloc import (
    BearingPair,
    GeometryError,
    UavPose,
    bearings_range_to_camera_point,
    camera_to_inertial,
)

__all__ = [
    "FilterError",
    "TargetBehindCamera",
    "SingularGeometry",
    "Measurement",
    "NoiseConfig",
    "FilterContext",
    "EkfState",
    "process_noise",
    "predict",
    "measurement_model",
    "jacobian",
    "update",
    "initialize",
    "ekf_step",
    "mean_filter_step",
    "no_filter_step",
]

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-9
_SINGULAR_EPS = 1e-12


class FilterError(RuntimeError):
    pass


class TargetBehindCamera(FilterError):
    """The predicted target maps to x_c <= 0; the measurement cannot be used."""


class SingularGeometry(FilterError):
    pass


@dataclass(frozen=True)
class Measurement:
    """z = [r, azimuth, elevation, h] observed at ``time`` seconds."""

    r: float
    azimuth: float
    elevation: float
    h: float
    time: float

    def __post_init__(self):
        vals = {k: float(getattr(self, k)) for k in ("r", "azimuth", "elevation", "h", "time")}
        for k, val in vals.items():
            if not math.isfinite(val):
                raise ValueError(f"measurement {k} must be finite, got {val!r}")
            object.__setattr__(self, k, val)
        if vals["r"] <= 0.0:
            raise ValueError(f"measurement range must be > 0, got {vals['r']!r}")
        for k in ("azimuth", "elevation"):
            if not (-math.pi < vals[k] <= math.pi):
                raise ValueError(f"measurement {k} must lie in (-pi, pi], got {vals[k]!r}")

    def as_vector(self) -> np.ndarray:
        return np.array([self.r, self.azimuth, self.elevation, self.h])


@dataclass(frozen=True)
class NoiseConfig:
    """Filter tuning.

    ``R_diag`` holds the measurement variances for (r, azimuth, elevation, h)
    in m^2, rad^2, rad^2, m^2. ``min_confidence`` is the detection gate used
    by callers that see raw detections.
    """

    R_diag: tuple = (1.0, 0.5, 0.5, 5.0)
    sigma_a: float = 1.0
    min_confidence: float = 0.0

    def __post_init__(self):
        R = tuple(float(x) for x in self.R_diag)
        if len(R) != 4:
            raise ValueError(f"R_diag needs 4 entries, got {len(R)}")
        if not all(math.isfinite(x) and x > 0.0 for x in R):
            raise ValueError(f"R_diag entries must be positive, got {R}")
        if not (math.isfinite(self.sigma_a) and self.sigma_a > 0.0):
            raise ValueError(f"sigma_a must be positive, got {self.sigma_a!r}")
        if not (0.0 <= self.min_confidence <= 1.0):
            raise ValueError(f"min_confidence must lie in [0, 1], got {self.min_confidence!r}")
        object.__setattr__(self, "R_diag", R)
        object.__setattr__(self, "sigma_a", float(self.sigma_a))

    @property
    def R(self) -> np.ndarray:
        return np.diag(self.R_diag)


@dataclass(frozen=True)
class FilterContext:
    pose: UavPose


@dataclass(frozen=True)
class EkfState:
    x: np.ndarray
    P: np.ndarray
    last_update_time: float
    # residual applied by the update that produced this state, angles wrapped
    innovation: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(3)
        P = np.array(self.P, dtype=float).reshape(3, 3)
        x.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "last_update_time", float(self.last_update_time))

    def covariance_ok(self) -> bool:
        P = self.P
        if np.max(np.abs(P - P.T)) > SYMMETRY_TOL:
            return False
        return bool(np.min(np.linalg.eigvalsh(P)) >= -PSD_TOL)


def process_noise(T: float, sigma_a: float) -> np.ndarray:
    return np.eye(3) * sigma_a * T**4 / 3.0


def predict(state: EkfState, T: float, cfg: NoiseConfig) -> EkfState:
    T = float(T)
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError(f"gap time must be positive and finite, got {T!r}")
    # F = I: the mean is carried over, only the covariance grows
    P = state.P + process_noise(T, cfg.sigma_a)
    return EkfState(state.x, P, state.last_update_time)


def _camera_point(x, ctx: FilterContext) -> tuple[np.ndarray, np.ndarray]:
    C = ctx.pose.camera_rotation()
    p_c = C @ (np.asarray(x, dtype=float) - ctx.pose.position)
    if p_c[0] <= 0.0:
        raise TargetBehindCamera(f"target behind camera (x_c = {p_c[0]:.6g})")
    return p_c, C


def measurement_model(x, ctx: FilterContext) -> np.ndarray:
    """Predicted [r, azimuth, elevation, h] for a target at inertial ``x``."""
    p_c, _ = _camera_point(x, ctx)
    xc, yc, zc = p_c
    return np.array(
        [
            math.sqrt(xc * xc + yc * yc + zc * zc),
            math.atan(yc / xc),
            math.atan(zc / xc),
            float(x[2]) + ctx.pose.altitude,
        ]
    )


def jacobian(x, ctx: FilterContext) -> np.ndarray:
    """4x3 Jacobian of :func:`measurement_model` with respect to ``x``.

    The elevation row uses ``x_c**2 + z_c**2`` as denominator, which is the
    derivative of ``atan(z_c / x_c)``.
    """
    p_c, C = _camera_point(x, ctx)
    xc, yc, zc = p_c
    r = float(np.linalg.norm(p_c))
    d_az = xc * xc + yc * yc
    d_el = xc * xc + zc * zc
    if d_az <= _SINGULAR_EPS or d_el <= _SINGULAR_EPS:
        raise SingularGeometry("bearing derivatives undefined at this geometry")
    dz_dpc = np.array(
        [
            [xc / r, yc / r, zc / r],
            [-yc / d_az, xc / d_az, 0.0],
            [-zc / d_el, 0.0, xc / d_el],
        ]
    )
    H = np.empty((4, 3))
    H[:3] = dz_dpc @ C
    H[3] = (0.0, 0.0, 1.0)
    return H


def innovation(z: Measurement, z_pred: np.ndarray) -> np.ndarray:
    y = z.as_vector() - z_pred
    y[1] = wrap_angle(y[1])
    y[2] = wrap_angle(y[2])
    return y


def update(state: EkfState, z: Measurement, ctx: FilterContext, cfg: NoiseConfig) -> EkfState:
    """Measurement update (Joseph form covariance)."""
    x_bar, P_bar = state.x, state.P
    z_pred = measurement_model(x_bar, ctx)
    H = jacobian(x_bar, ctx)
    R = cfg.R
    y = innovation(z, z_pred)
    S = H @ P_bar @ H.T + R
    try:
        K = np.linalg.solve(S, H @ P_bar).T
    except np.linalg.LinAlgError as exc:
        raise FilterError("innovation covariance is singular") from exc
    x = x_bar + K @ y
    I_KH = np.eye(3) - K @ H
    P = I_KH @ P_bar @ I_KH.T + K @ R @ K.T
    P = 0.5 * (P + P.T)
    return EkfState(x, P, z.time, innovation=y)


def initialize(z: Measurement, ctx: FilterContext) -> EkfState:
    """Geometric initialization from a single measurement, P = I."""
    try:
        b = BearingPair(z.azimuth, z.elevation)
    except GeometryError as exc:
        raise TargetBehindCamera(str(exc)) from exc
    x = camera_to_inertial(bearings_range_to_camera_point(b, z.r), ctx.pose)
    return EkfState(x, np.eye(3), z.time)


def ekf_step(
    state: Optional[EkfState],
    z: Measurement,
    ctx: FilterContext,
    cfg: NoiseConfig,
) -> EkfState:
    """One pass of the estimation loop for a valid measurement.

    The first measurement initializes the state geometrically; later ones
    predict over the gap time since the last update and then correct.
    """
    if state is None:
        return initialize(z, ctx)
    T = z.time - state.last_update_time
    if not T > 0.0:
        raise FilterError(
            f"non-monotonic timestamp: {z.time!r} <= last update {state.last_update_time!r}"
        )
    return update(predict(state, T, cfg), z, ctx, cfg)


def mean_filter_step(history: Sequence) -> np.ndarray:
    """Arithmetic mean of every geometric solution seen so far."""
    arr = np.asarray(history, dtype=float)
    if arr.size == 0:
        raise ValueError("mean filter needs at least one sample")
    return arr.reshape(-1, 3).mean(axis=0)


def no_filter_step(latest) -> np.ndarray:
    return np.array(latest, dtype=float).reshape(3)
