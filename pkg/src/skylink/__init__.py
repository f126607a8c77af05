"""UAV-assisted geolocation of an unmanned surface vehicle.

Camera pixel error plus datalink range are triangulated into an inertial
position, then refined by a stationary-target EKF. A deterministic simulator
benchmarks the EKF against mean-filter and no-filter baselines.
"""
from .estimators import EkfLocalizer, MeanFilterLocalizer, NoFilterLocalizer
from .filters import EkfState, FilterContext, Measurement, NoiseConfig, ekf_step
from .frames import EulerAngles, rotation_from_euler
from .geoloc import CameraFov, UavPose, geometric_solve
from .sensing import Detection, GimbalController, SensorNoise
from .simworld import ScenarioConfig, compute_metrics, run_scenario

__version__ = "0.1.0"

__all__ = [
    "CameraFov",
    "Detection",
    "EkfLocalizer",
    "EkfState",
    "EulerAngles",
    "FilterContext",
    "GimbalController",
    "Measurement",
    "MeanFilterLocalizer",
    "NoFilterLocalizer",
    "NoiseConfig",
    "ScenarioConfig",
    "SensorNoise",
    "UavPose",
    "compute_metrics",
    "ekf_step",
    "geometric_solve",
    "rotation_from_euler",
    "run_scenario",
]
