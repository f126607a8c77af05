"""Input checks shared by the estimators and the replay command."""
from __future__ import annotations

import numpy as np

__all__ = ["LOG_COLUMNS", "LogValidationError", "check_measurement_log"]

LOG_COLUMNS = (
    "time_s",
    "u",
    "v",
    "confidence",
    "range_m",
    "uav_x",
    "uav_y",
    "uav_z",
    "uav_roll_deg",
    "uav_pitch_deg",
    "uav_yaw_deg",
    "gimbal_roll_deg",
    "gimbal_pitch_deg",
    "gimbal_yaw_deg",
)


class LogValidationError(ValueError):
    """A measurement log row is malformed. ``row`` is the 1-based data row."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


def check_measurement_log(X) -> np.ndarray:
    """Validate a measurement log given as an (n, 14) array in ``LOG_COLUMNS`` order.

    Returns a float copy. Raises :class:`LogValidationError` naming the first
    offending row.
    """
    try:
        arr = np.array(X, dtype=float)
    except (TypeError, ValueError) as exc:
        raise LogValidationError(1, f"non-numeric value ({exc})") from exc
    if arr.ndim == 1 and arr.size == len(LOG_COLUMNS):
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != len(LOG_COLUMNS):
        raise ValueError(f"measurement log must have shape (n, {len(LOG_COLUMNS)}), got {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("measurement log is empty")
    for i, row in enumerate(arr, start=1):
        if not np.all(np.isfinite(row)):
            col = LOG_COLUMNS[int(np.flatnonzero(~np.isfinite(row))[0])]
            raise LogValidationError(i, f"{col} is not finite")
        t, u, v, conf, r = row[:5]
        if abs(u) > 1.0 or abs(v) > 1.0:
            raise LogValidationError(i, f"pixel error ({u:g}, {v:g}) outside [-1, 1]")
        if not 0.0 <= conf <= 1.0:
            raise LogValidationError(i, f"confidence {conf:g} outside [0, 1]")
        if r <= 0.0:
            raise LogValidationError(i, f"range_m must be > 0, got {r:g}")
        if row[7] < 0.0:
            raise LogValidationError(i, f"uav_z must be >= 0, got {row[7]:g}")
        if i > 1 and not t > arr[i - 2, 0]:
            raise LogValidationError(i, f"time_s {t:g} is not strictly increasing")
    return arr
