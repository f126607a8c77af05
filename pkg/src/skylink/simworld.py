"""Deterministic scenario engine: a kinematic USV under wave disturbance, a
hovering UAV with a tracking gimbal, and the three estimators run side by side.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .filters import (
    EkfState,
    FilterContext,
    FilterError,
    Measurement,
    NoiseConfig,
    ekf_step,
    mean_filter_step,
    no_filter_step,
    process_noise,
)
from .frames import EulerAngles, wrap_angle
from .geoloc import (
    CameraFov,
    GeometryError,
    UavPose,
    bearings_range_to_camera_point,
    camera_to_inertial,
    pixel_to_bearings,
)
from .sensing import (
    Detection,
    GimbalController,
    SensorNoise,
    gimbal_control_step,
    simulate_detection,
    simulate_range,
)

__all__ = [
    "UsvState",
    "VelocityCommand",
    "UsvPlan",
    "Disturbance",
    "SearchPattern",
    "ScenarioConfig",
    "TraceRecord",
    "MetricsRow",
    "MetricsReport",
    "STRATEGIES",
    "usv_step",
    "run_scenario",
    "compute_metrics",
]

logger = logging.getLogger(__name__)

STRATEGIES = ("ekf", "mean_filter", "no_filter")
_TIME_EPS = 1e-9


@dataclass(frozen=True)
class UsvState:
    position: np.ndarray
    yaw: float = 0.0
    surge: float = 0.0
    sway: float = 0.0

    def __post_init__(self):
        p = np.array(self.position, dtype=float).reshape(3)
        p.setflags(write=False)
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))


@dataclass(frozen=True)
class VelocityCommand:
    surge: float
    sway: float = 0.0
    yaw: Optional[float] = None


@dataclass(frozen=True)
class UsvPlan:
    """Waypoint list (ENU x, y) followed at ``surge`` m/s with a turn-rate limit.

    An empty waypoint list with ``surge == 0`` is a stationary USV. After the
    last waypoint is reached the USV stops.
    """

    waypoints: tuple = ()
    surge: float = 0.0
    turn_rate: float = math.radians(30.0)
    acceptance_radius: float = 2.0

    def __post_init__(self):
        wps = tuple(tuple(float(c) for c in wp) for wp in self.waypoints)
        for wp in wps:
            if len(wp) != 2:
                raise ValueError(f"waypoints are (x, y) pairs, got {wp!r}")
        object.__setattr__(self, "waypoints", wps)
        if self.surge < 0.0 or self.turn_rate <= 0.0 or self.acceptance_radius <= 0.0:
            raise ValueError("surge must be >= 0; turn_rate and acceptance_radius > 0")


@dataclass(frozen=True)
class Disturbance:
    """Sinusoidal wave drift along ``heading`` plus white velocity jitter."""

    amplitude: float = 0.0
    period: float = 8.0
    heading: float = 0.0
    jitter_sigma: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0.0 or self.jitter_sigma < 0.0 or self.period <= 0.0:
            raise ValueError("amplitude, jitter_sigma must be >= 0 and period > 0")

    def wave_velocity(self, t: float) -> np.ndarray:
        speed = self.amplitude * math.sin(2.0 * math.pi * t / self.period)
        return speed * np.array([math.cos(self.heading), math.sin(self.heading)])


@dataclass(frozen=True)
class SearchPattern:
    """Raster scan used while the target is not in view.

    Every missed frame advances gimbal yaw by ``yaw_step``; after a full turn
    the pitch moves to the next entry of ``pitches``.
    """

    yaw_step: float = math.radians(10.0)
    pitches: tuple = (math.radians(-5.0), math.radians(-15.0), math.radians(-30.0))


@dataclass(frozen=True)
class ScenarioConfig:
    duration: float
    dt: float
    uav: UavPose
    fov: CameraFov
    usv_start: UsvState
    noise: SensorNoise = field(default_factory=SensorNoise)
    controller: GimbalController = field(default_factory=GimbalController)
    usv_plan: UsvPlan = field(default_factory=UsvPlan)
    disturbance: Disturbance = field(default_factory=Disturbance)
    filter: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int = 0
    measurement_period: float = 1.0
    water_height: float = 0.0
    search: Optional[SearchPattern] = None

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt: must be > 0, got {self.dt!r}")
        if not (math.isfinite(self.duration) and self.duration >= self.dt):
            raise ValueError(f"duration: must be >= dt, got {self.duration!r}")
        if not self.measurement_period >= self.dt:
            raise ValueError(
                f"measurement_period: must be >= dt, got {self.measurement_period!r}"
            )
        ratio = self.measurement_period / self.dt
        if abs(ratio - round(ratio)) > 1e-6:
            raise ValueError("measurement_period: must be an integer multiple of dt")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed: must be an unsigned 64-bit integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def measurement_stride(self) -> int:
        return int(round(self.measurement_period / self.dt))


@dataclass(frozen=True)
class TraceRecord:
    time: float
    usv_true: np.ndarray
    usv_yaw: float
    ekf_estimate: np.ndarray
    mean_estimate: np.ndarray
    raw_estimate: np.ndarray
    measurement: Optional[Measurement]
    gimbal: EulerAngles
    ekf_covariance: np.ndarray
    innovation: Optional[np.ndarray] = None
    # detection and pose the measurement was taken with (for log export)
    detection: Optional[Detection] = None
    measurement_pose: Optional[UavPose] = None
    error_2d_ekf: float = field(init=False)
    error_2d_mean: float = field(init=False)
    error_2d_raw: float = field(init=False)

    def __post_init__(self):
        for name, attr in (("ekf", "ekf_estimate"), ("mean", "mean_estimate"), ("raw", "raw_estimate")):
            d = getattr(self, attr)[:2] - self.usv_true[:2]
            object.__setattr__(self, f"error_2d_{name}", float(math.hypot(d[0], d[1])))

    def estimate(self, strategy: str) -> np.ndarray:
        return {"ekf": self.ekf_estimate, "mean_filter": self.mean_estimate, "no_filter": self.raw_estimate}[
            strategy
        ]


def _wp_reached(pos, wp, radius) -> bool:
    return math.hypot(wp[0] - pos[0], wp[1] - pos[1]) <= radius


def usv_step(
    state: UsvState,
    command,
    dt: float,
    disturbance: Disturbance,
    rng: np.random.Generator,
    t: float = 0.0,
    turn_rate: float = math.radians(30.0),
) -> UsvState:
    """Advance the USV kinematics by ``dt``.

    ``command`` is either a :class:`VelocityCommand` or an ``(x, y, surge)``
    waypoint target. The z coordinate is never touched.
    """
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    if isinstance(command, VelocityCommand):
        surge, sway = command.surge, command.sway
        yaw = state.yaw if command.yaw is None else wrap_angle(command.yaw)
    else:
        wx, wy, surge = command
        sway = 0.0
        desired = math.atan2(wy - state.position[1], wx - state.position[0])
        max_turn = turn_rate * dt
        yaw = wrap_angle(state.yaw + min(max_turn, max(-max_turn, wrap_angle(desired - state.yaw))))
    c, s = math.cos(yaw), math.sin(yaw)
    vel = np.array([c * surge - s * sway, s * surge + c * sway])
    vel = vel + disturbance.wave_velocity(t)
    if disturbance.jitter_sigma > 0.0:
        vel = vel + rng.normal(0.0, disturbance.jitter_sigma, size=2)
    pos = state.position.copy()
    pos[:2] += vel * dt
    return UsvState(pos, yaw, surge, sway)


def _plan_command(plan: UsvPlan, state: UsvState, wp_index: int):
    while wp_index < len(plan.waypoints) and _wp_reached(
        state.position, plan.waypoints[wp_index], plan.acceptance_radius
    ):
        wp_index += 1
    if wp_index >= len(plan.waypoints) or plan.surge == 0.0:
        return VelocityCommand(0.0), wp_index
    wx, wy = plan.waypoints[wp_index]
    return (wx, wy, plan.surge), wp_index


def _search_step(gimbal: EulerAngles, search: SearchPattern, progress: float, row: int):
    progress += search.yaw_step
    if progress >= 2.0 * math.pi - 1e-12:
        progress = 0.0
        row = (row + 1) % len(search.pitches)
    return EulerAngles(gimbal.roll, search.pitches[row], gimbal.yaw + search.yaw_step), progress, row


def run_scenario(cfg: ScenarioConfig) -> list[TraceRecord]:
    """Run the scenario and return one record per simulation step (n_steps + 1).

    Pure function of ``cfg``: all randomness comes from one generator seeded
    with ``cfg.seed``.
    """
    rng = np.random.default_rng(int(cfg.seed))
    usv = replace(cfg.usv_start, position=_pin(cfg.usv_start.position, cfg.water_height))
    gimbal = cfg.uav.gimbal
    wp_index = 0
    search_progress, search_row = 0.0, 0

    ekf: Optional[EkfState] = None
    history: list[np.ndarray] = []
    nan3 = np.full(3, np.nan)
    mean_est = raw_est = nan3
    trace: list[TraceRecord] = []

    for k in range(cfg.n_steps + 1):
        t = k * cfg.dt
        if k > 0:
            command, wp_index = _plan_command(cfg.usv_plan, usv, wp_index)
            usv = usv_step(usv, command, cfg.dt, cfg.disturbance, rng, t - cfg.dt, cfg.usv_plan.turn_rate)
            usv = replace(usv, position=_pin(usv.position, cfg.water_height))

        meas = None
        innov = None
        used_det = used_pose = None
        if k % cfg.measurement_stride == 0:
            pose = cfg.uav.with_gimbal(gimbal)
            det = simulate_detection(usv.position, pose, cfg.fov, cfg.noise, rng, time=t)
            if det is not None and det.confidence >= cfg.filter.min_confidence:
                r = simulate_range(usv.position, pose.position, cfg.noise, rng)
                b = pixel_to_bearings(det.u, det.v, cfg.fov)
                meas = Measurement(r, b.azimuth, b.elevation, pose.altitude, t)
                used_det, used_pose = det, pose
                raw_est = camera_to_inertial(bearings_range_to_camera_point(b, r), pose)
                history.append(raw_est)
                mean_est = mean_filter_step(history)
                raw_est = no_filter_step(raw_est)
                try:
                    ekf = ekf_step(ekf, meas, FilterContext(pose), cfg.filter)
                    innov = ekf.innovation
                except (FilterError, GeometryError) as exc:
                    logger.debug("t=%.3f: measurement rejected by filter: %s", t, exc)
                gimbal = gimbal_control_step(gimbal, det, cfg.controller)
            elif det is None and cfg.search is not None:
                gimbal, search_progress, search_row = _search_step(
                    gimbal, cfg.search, search_progress, search_row
                )

        if ekf is None:
            ekf_x, ekf_P = nan3, np.full((3, 3), np.nan)
        else:
            ekf_x = ekf.x
            gap = t - ekf.last_update_time
            ekf_P = ekf.P + process_noise(gap, cfg.filter.sigma_a) if gap > 0 else ekf.P
        trace.append(
            TraceRecord(
                time=t,
                usv_true=usv.position,
                usv_yaw=usv.yaw,
                ekf_estimate=ekf_x,
                mean_estimate=mean_est,
                raw_estimate=raw_est,
                measurement=meas,
                gimbal=gimbal,
                ekf_covariance=ekf_P,
                innovation=innov,
                detection=used_det,
                measurement_pose=used_pose,
            )
        )
    return trace


def _pin(position, water_height: float) -> np.ndarray:
    p = np.array(position, dtype=float)
    p[2] = water_height
    return p


@dataclass(frozen=True)
class MetricsRow:
    strategy: str
    time: float
    err_x: float
    err_y: float
    err_2d: float


@dataclass(frozen=True)
class MetricsReport:
    rows: list
    mean_2d: dict
    max_2d: dict

    def row(self, strategy: str, time: float) -> MetricsRow:
        for r in self.rows:
            if r.strategy == strategy and abs(r.time - time) <= _TIME_EPS:
                return r
        raise KeyError((strategy, time))


def compute_metrics(trace: Sequence[TraceRecord], checkpoints: Sequence[float]) -> MetricsReport:
    """Signed X/Y and 2D errors per strategy at each checkpoint, plus the
    mean and max 2D error over the whole trace (records without an estimate
    are skipped). Each checkpoint uses the last record at or before it.
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    times = np.array([rec.time for rec in trace])
    t0, t1 = times[0], times[-1]
    idx = []
    for cp in checkpoints:
        cp = float(cp)
        if not (t0 - _TIME_EPS <= cp <= t1 + _TIME_EPS):
            raise ValueError(f"checkpoint {cp:g} s outside trace span [{t0:g}, {t1:g}] s")
        idx.append(int(np.searchsorted(times, cp + _TIME_EPS, side="right")) - 1)

    rows = []
    for strategy in STRATEGIES:
        for cp, i in zip(checkpoints, idx):
            rec = trace[i]
            d = rec.estimate(strategy)[:2] - rec.usv_true[:2]
            rows.append(MetricsRow(strategy, float(cp), float(d[0]), float(d[1]), float(math.hypot(d[0], d[1]))))

    mean_2d, max_2d = {}, {}
    for strategy, attr in zip(STRATEGIES, ("error_2d_ekf", "error_2d_mean", "error_2d_raw")):
        errs = np.array([getattr(rec, attr) for rec in trace])
        errs = errs[np.isfinite(errs)]
        mean_2d[strategy] = float(errs.mean()) if errs.size else math.nan
        max_2d[strategy] = float(errs.max()) if errs.size else math.nan
    return MetricsReport(rows, mean_2d, max_2d)
