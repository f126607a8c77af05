"""scikit-learn style wrappers around the recursive localizers.

Each estimator consumes a measurement log: an ``(n, 14)`` array whose columns
follow :data:`skylink.validation.LOG_COLUMNS` (angles in degrees).
``transform`` returns the running ``(n, 3)`` position estimate after each
row; ``fit`` runs the same pass and keeps the final estimate in
``position_``.

>>> loc = EkfLocalizer(fov_deg=(20.0, 15.0)).fit(log)      # doctest: +SKIP
>>> loc.position_                                          # doctest: +SKIP
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .filters import (
    EkfState,
    FilterContext,
    FilterError,
    Measurement,
    NoiseConfig,
    ekf_step,
    mean_filter_step,
    no_filter_step,
)
from .frames import EulerAngles
from .geoloc import (
    CameraFov,
    GeometryError,
    UavPose,
    bearings_range_to_camera_point,
    camera_to_inertial,
    pixel_to_bearings,
)
from .validation import check_measurement_log

__all__ = ["LogRow", "log_rows", "EkfLocalizer", "MeanFilterLocalizer", "NoFilterLocalizer"]


@dataclass(frozen=True)
class LogRow:
    time: float
    u: float
    v: float
    confidence: float
    r: float
    pose: UavPose


def log_rows(X):
    """Yield :class:`LogRow` objects for a validated log array."""
    for row in check_measurement_log(X):
        pose = UavPose(
            row[5:8],
            EulerAngles(*(math.radians(a) for a in row[8:11])),
            EulerAngles(*(math.radians(a) for a in row[11:14])),
        )
        yield LogRow(row[0], row[1], row[2], row[3], row[4], pose)


class _LogLocalizer(TransformerMixin, BaseEstimator):
    def __init__(self, fov_deg=(60.0, 45.0), min_confidence=0.0):
        self.fov_deg = fov_deg
        self.min_confidence = min_confidence

    def _fov(self) -> CameraFov:
        h, v = self.fov_deg
        return CameraFov.from_degrees(h, v)

    def _geometric(self, row: LogRow, fov: CameraFov):
        b = pixel_to_bearings(row.u, row.v, fov)
        return b, camera_to_inertial(bearings_range_to_camera_point(b, row.r), row.pose)

    def _run(self, X) -> np.ndarray:
        raise NotImplementedError

    def fit(self, X, y=None):
        est = self._run(X)
        self.estimates_ = est
        self.position_ = est[-1].copy()
        self.n_features_in_ = np.asarray(X).shape[-1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        return self._run(X)

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X, y)
        return self.estimates_.copy()


class EkfLocalizer(_LogLocalizer):
    """Stationary-target EKF run over a measurement log.

    Rows below ``min_confidence`` or that the filter rejects leave the
    estimate unchanged. Rows before the first accepted one are NaN.
    After fitting, ``covariance_diag_`` holds the per-row diagonal of P and
    ``state_`` the final :class:`~skylink.filters.EkfState`.
    """

    def __init__(self, fov_deg=(60.0, 45.0), R_diag=(1.0, 0.5, 0.5, 5.0), sigma_a=1.0, min_confidence=0.0):
        super().__init__(fov_deg=fov_deg, min_confidence=min_confidence)
        self.R_diag = R_diag
        self.sigma_a = sigma_a

    def _noise_config(self) -> NoiseConfig:
        return NoiseConfig(tuple(self.R_diag), self.sigma_a, self.min_confidence)

    def _filter(self, X):
        fov, cfg = self._fov(), self._noise_config()
        state = None
        est, pdiag = [], []
        for row in log_rows(X):
            if row.confidence >= cfg.min_confidence:
                b = pixel_to_bearings(row.u, row.v, fov)
                z = Measurement(row.r, b.azimuth, b.elevation, row.pose.altitude, row.time)
                try:
                    state = ekf_step(state, z, FilterContext(row.pose), cfg)
                except (FilterError, GeometryError):
                    pass
            if state is None:
                est.append(np.full(3, np.nan))
                pdiag.append(np.full(3, np.nan))
            else:
                est.append(state.x.copy())
                pdiag.append(np.diag(state.P).copy())
        return np.array(est), np.array(pdiag), state

    def _run(self, X):
        return self._filter(X)[0]

    def fit(self, X, y=None):
        est, pdiag, state = self._filter(X)
        self.estimates_ = est
        self.covariance_diag_ = pdiag
        self.state_: EkfState | None = state
        self.position_ = est[-1].copy()
        self.n_features_in_ = np.asarray(X).shape[-1]
        return self


class MeanFilterLocalizer(_LogLocalizer):
    """Running mean of the single-frame geometric solutions."""

    def _run(self, X):
        fov = self._fov()
        history, out = [], []
        for row in log_rows(X):
            if row.confidence >= self.min_confidence:
                history.append(self._geometric(row, fov)[1])
            out.append(mean_filter_step(history) if history else np.full(3, np.nan))
        return np.array(out)


class NoFilterLocalizer(_LogLocalizer):
    """Latest single-frame geometric solution, unfiltered."""

    def _run(self, X):
        fov = self._fov()
        last = np.full(3, np.nan)
        out = []
        for row in log_rows(X):
            if row.confidence >= self.min_confidence:
                last = no_filter_step(self._geometric(row, fov)[1])
            out.append(last.copy())
        return np.array(out)
