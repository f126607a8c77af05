import math
import sys
from importlib.resources import files

import numpy as np
import pytest

from skylink.frames import EulerAngles
from skylink.geoloc import CameraFov, UavPose

SCENARIOS = files("skylink") / "scenarios"


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def fov():
    return CameraFov.from_degrees(60.0, 45.0)


def random_pose(rng, altitude=(5.0, 50.0), gimbal_pitch_deg=(-80.0, -5.0), tilt_deg=10.0) -> UavPose:
    pos = np.array([rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(*altitude)])
    att = EulerAngles(*np.radians(rng.uniform(-tilt_deg, tilt_deg, 2)), rng.uniform(-math.pi, math.pi))
    gim = EulerAngles(0.0, math.radians(rng.uniform(*gimbal_pitch_deg)), rng.uniform(-math.pi, math.pi))
    return UavPose(pos, att, gim)


def scenario_path(name: str):
    return SCENARIOS / f"{name}.yaml"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
