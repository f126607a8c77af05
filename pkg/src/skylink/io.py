"""CSV serialization of traces, metrics, measurement logs and replay output.

Floats are written with ``repr`` (shortest round-trip form) so identical runs
produce byte-identical files. Missing values are empty fields.
"""
from __future__ import annotations

import csv
import math
from typing import Iterable, Sequence

import numpy as np

from .simworld import STRATEGIES, MetricsReport, TraceRecord
from .validation import LOG_COLUMNS, LogValidationError

__all__ = [
    "TRACE_COLUMNS",
    "METRICS_COLUMNS",
    "REPLAY_COLUMNS",
    "LOG_COLUMNS",
    "fmt",
    "write_trace",
    "write_metrics",
    "write_measurement_log",
    "read_measurement_log",
    "write_replay",
]

TRACE_COLUMNS = (
    "time_s",
    "true_x", "true_y", "true_z",
    "ekf_x", "ekf_y", "ekf_z",
    "mean_x", "mean_y", "mean_z",
    "raw_x", "raw_y", "raw_z",
    "meas_r", "meas_alpha_rad", "meas_eps_rad", "meas_h",
    "gimbal_pitch_deg", "gimbal_yaw_deg",
    "err2d_ekf", "err2d_mean", "err2d_raw",
)  # fmt: skip

METRICS_COLUMNS = ("strategy", "time_s", "err_x", "err_y", "err_2d")

REPLAY_COLUMNS = ("time_s", "ekf_x", "ekf_y", "ekf_z", "P_xx", "P_yy", "P_zz")


def fmt(value) -> str:
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def _write(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _trace_row(rec: TraceRecord) -> list:
    m = rec.measurement
    meas = (None,) * 4 if m is None else (m.r, m.azimuth, m.elevation, m.h)
    values = [rec.time, *rec.usv_true, *rec.ekf_estimate, *rec.mean_estimate, *rec.raw_estimate, *meas]
    values += [math.degrees(rec.gimbal.pitch), math.degrees(rec.gimbal.yaw)]
    values += [rec.error_2d_ekf, rec.error_2d_mean, rec.error_2d_raw]
    return [fmt(v) for v in values]


def write_trace(path, trace: Sequence[TraceRecord]) -> None:
    _write(path, TRACE_COLUMNS, (_trace_row(rec) for rec in trace))


def write_metrics(path, report: MetricsReport) -> None:
    """Table-shaped metrics: one row per (strategy, checkpoint), then
    ``mean`` and ``max`` rows per strategy carrying only ``err_2d``."""
    rows = [[r.strategy, fmt(r.time), fmt(r.err_x), fmt(r.err_y), fmt(r.err_2d)] for r in report.rows]
    for strategy in STRATEGIES:
        rows.append([strategy, "mean", "", "", fmt(report.mean_2d[strategy])])
        rows.append([strategy, "max", "", "", fmt(report.max_2d[strategy])])
    _write(path, METRICS_COLUMNS, rows)


def write_measurement_log(path, trace: Sequence[TraceRecord]) -> None:
    """Export the detections a simulation consumed, in replay-log format."""
    rows = []
    for rec in trace:
        if rec.measurement is None:
            continue
        det, pose = rec.detection, rec.measurement_pose
        att, gim = pose.attitude, pose.gimbal
        values = [
            rec.time, det.u, det.v, det.confidence, rec.measurement.r, *pose.position,
            *(math.degrees(a) for a in (att.roll, att.pitch, att.yaw)),
            *(math.degrees(a) for a in (gim.roll, gim.pitch, gim.yaw)),
        ]  # fmt: skip
        rows.append([fmt(v) for v in values])
    _write(path, LOG_COLUMNS, rows)


def read_measurement_log(path) -> np.ndarray:
    """Parse a measurement log CSV. Header row is mandatory and must match
    ``LOG_COLUMNS``. Raises :class:`LogValidationError` with the data row
    number for unparseable rows; semantic checks happen in validation."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LogValidationError(0, "missing header row")
        if tuple(h.strip() for h in header) != LOG_COLUMNS:
            raise LogValidationError(0, f"header must be {','.join(LOG_COLUMNS)}")
        rows = []
        for i, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(LOG_COLUMNS):
                raise LogValidationError(i, f"expected {len(LOG_COLUMNS)} fields, got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise LogValidationError(i, f"non-numeric field ({exc})") from exc
    if not rows:
        raise LogValidationError(1, "log has no data rows")
    return np.array(rows)


def write_replay(path, times, estimates, cov_diag) -> None:
    rows = ([fmt(t), *(fmt(v) for v in x), *(fmt(v) for v in p)] for t, x, p in zip(times, estimates, cov_diag))
    _write(path, REPLAY_COLUMNS, rows)

