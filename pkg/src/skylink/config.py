"""YAML scenario documents <-> :class:`ScenarioConfig`.

Key names follow the dataclass field names. Every angle in a document is in
degrees and is converted to radians here, nowhere else. Controller gains
(rad per unit pixel error) and the filter variances in ``filter.R_diag``
(m^2, rad^2, rad^2, m^2) are not angles and are taken as-is.

A minimal document::

    duration: 100        # s
    dt: 0.1              # s
    uav: {position: [0, 0, 7.5]}
    fov: {horizontal: 20, vertical: 15}      # deg
    usv_start: {position: [300, 0]}

When ``uav.gimbal`` is omitted the gimbal starts aimed at the USV.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Mapping

import yaml

from .filters import NoiseConfig
from .frames import EulerAngles
from .geoloc import CameraFov, UavPose
from .sensing import GimbalController, SensorNoise, point_gimbal_at
from .simworld import Disturbance, ScenarioConfig, SearchPattern, UsvPlan, UsvState

__all__ = ["ConfigError", "load_config", "parse_config", "load_replay_config", "config_to_document"]


class ConfigError(ValueError):
    """Invalid configuration document; the message starts with the key path."""


_TOP_KEYS = {
    "duration": True,
    "dt": True,
    "uav": True,
    "fov": True,
    "usv_start": True,
    "noise": False,
    "controller": False,
    "usv_plan": False,
    "disturbance": False,
    "filter": False,
    "seed": False,
    "measurement_period": False,
    "water_height": False,
    "search": False,
}


def _section(doc: Any, path: str, allowed, required=()) -> dict:
    if doc is None:
        doc = {}
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{path}: expected a mapping, got {type(doc).__name__}")
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"{path + '.' if path else ''}{unknown[0]}: unknown key")
    for key in required:
        if key not in doc:
            raise ConfigError(f"{path + '.' if path else ''}{key}: required key missing")
    return dict(doc)


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return value


def _angle(value, path: str, lo: float = -360.0, hi: float = 360.0) -> float:
    deg = _num(value, path)
    if not lo <= deg <= hi:
        raise ConfigError(f"{path}: angle {deg:g} deg out of range [{lo:g}, {hi:g}] deg")
    return math.radians(deg)


def _vec(value, path: str, n: int) -> list:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(f"{path}: expected a list of {n} numbers, got {value!r}")
    return [_num(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _build(path: str, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        msg = str(exc)
        raise ConfigError(msg if msg.split(":")[0] in _TOP_KEYS else f"{path}: {msg}") from exc


def _euler(doc, path: str) -> EulerAngles:
    d = _section(doc, path, ("roll", "pitch", "yaw"))
    return EulerAngles(
        _angle(d.get("roll", 0.0), f"{path}.roll", -180, 180),
        _angle(d.get("pitch", 0.0), f"{path}.pitch", -90, 90),
        _angle(d.get("yaw", 0.0), f"{path}.yaw", -360, 360),
    )


def _fov(doc, path="fov") -> CameraFov:
    d = _section(doc, path, ("horizontal", "vertical"), ("horizontal", "vertical"))
    h = _angle(d["horizontal"], f"{path}.horizontal", 0, 180)
    v = _angle(d["vertical"], f"{path}.vertical", 0, 180)
    for key, val in (("horizontal", h), ("vertical", v)):
        if not 0.0 < val < math.pi:
            raise ConfigError(f"{path}.{key}: angle must lie in (0, 180) deg")
    return CameraFov(h, v)


def _filter(doc, path="filter") -> NoiseConfig:
    d = _section(doc, path, ("R_diag", "sigma_a", "min_confidence"))
    kwargs = {}
    if "R_diag" in d:
        kwargs["R_diag"] = tuple(_vec(d["R_diag"], f"{path}.R_diag", 4))
    if "sigma_a" in d:
        kwargs["sigma_a"] = _num(d["sigma_a"], f"{path}.sigma_a")
    if "min_confidence" in d:
        kwargs["min_confidence"] = _num(d["min_confidence"], f"{path}.min_confidence")
    return _build(path, NoiseConfig, **kwargs)


def _limits(value, path: str, lo: float, hi: float):
    if value is None:
        return None
    a, b = _vec(value, path, 2)
    return (_angle(a, f"{path}[0]", lo, hi), _angle(b, f"{path}[1]", lo, hi))


def parse_config(doc: Any) -> ScenarioConfig:
    d = _section(doc, "", _TOP_KEYS, [k for k, req in _TOP_KEYS.items() if req])
    duration = _num(d["duration"], "duration")
    dt = _num(d["dt"], "dt")
    if dt <= 0.0:
        raise ConfigError(f"dt: must be > 0, got {dt:g}")
    fov = _fov(d["fov"])

    s = _section(d["usv_start"], "usv_start", ("position", "yaw", "surge", "sway"), ("position",))
    xy = _vec(s["position"], "usv_start.position", 2)
    water = _num(d.get("water_height", 0.0), "water_height")
    usv = _build(
        "usv_start",
        UsvState,
        [xy[0], xy[1], water],
        _angle(s.get("yaw", 0.0), "usv_start.yaw"),
        _num(s.get("surge", 0.0), "usv_start.surge"),
        _num(s.get("sway", 0.0), "usv_start.sway"),
    )

    u = _section(d["uav"], "uav", ("position", "attitude", "gimbal"), ("position",))
    attitude = _euler(u.get("attitude"), "uav.attitude")
    pose = _build("uav", UavPose, _vec(u["position"], "uav.position", 3), attitude)
    if u.get("gimbal") is None:
        pose = pose.with_gimbal(point_gimbal_at(usv.position, pose))
    else:
        pose = pose.with_gimbal(_euler(u["gimbal"], "uav.gimbal"))

    n = _section(d.get("noise"), "noise", ("pixel_sigma", "range_sigma", "miss_probability", "confidence_floor", "seed"))
    noise = _build(
        "noise",
        SensorNoise,
        **{k: (int(v) if k == "seed" else _num(v, f"noise.{k}")) for k, v in n.items()},
    )

    c = _section(d.get("controller"), "controller", ("gain_azimuth", "gain_elevation", "pitch_limits", "yaw_limits", "deadband"))
    ckw = {k: _num(c[k], f"controller.{k}") for k in ("gain_azimuth", "gain_elevation", "deadband") if k in c}
    if "pitch_limits" in c:
        ckw["pitch_limits"] = _limits(c["pitch_limits"], "controller.pitch_limits", -90, 90)
    if "yaw_limits" in c:
        ckw["yaw_limits"] = _limits(c["yaw_limits"], "controller.yaw_limits", -360, 360)
    controller = _build("controller", GimbalController, **ckw)

    p = _section(d.get("usv_plan"), "usv_plan", ("waypoints", "surge", "turn_rate", "acceptance_radius"))
    pkw = {}
    if "waypoints" in p:
        if not isinstance(p["waypoints"], (list, tuple)):
            raise ConfigError("usv_plan.waypoints: expected a list of [x, y] pairs")
        pkw["waypoints"] = tuple(tuple(_vec(wp, f"usv_plan.waypoints[{i}]", 2)) for i, wp in enumerate(p["waypoints"]))
    if "surge" in p:
        pkw["surge"] = _num(p["surge"], "usv_plan.surge")
    if "turn_rate" in p:
        pkw["turn_rate"] = _angle(p["turn_rate"], "usv_plan.turn_rate", 0, 360)
    if "acceptance_radius" in p:
        pkw["acceptance_radius"] = _num(p["acceptance_radius"], "usv_plan.acceptance_radius")
    plan = _build("usv_plan", UsvPlan, **pkw)

    w = _section(d.get("disturbance"), "disturbance", ("amplitude", "period", "heading", "jitter_sigma"))
    wkw = {k: _num(w[k], f"disturbance.{k}") for k in ("amplitude", "period", "jitter_sigma") if k in w}
    if "heading" in w:
        wkw["heading"] = _angle(w["heading"], "disturbance.heading")
    disturbance = _build("disturbance", Disturbance, **wkw)

    search = None
    if d.get("search") is not None:
        sr = _section(d["search"], "search", ("yaw_step", "pitches"))
        skw = {}
        if "yaw_step" in sr:
            skw["yaw_step"] = _angle(sr["yaw_step"], "search.yaw_step", 0, 360)
            if skw["yaw_step"] <= 0.0:
                raise ConfigError("search.yaw_step: must be > 0 deg")
        if "pitches" in sr:
            if not isinstance(sr["pitches"], (list, tuple)) or not sr["pitches"]:
                raise ConfigError("search.pitches: expected a non-empty list of angles")
            skw["pitches"] = tuple(_angle(a, f"search.pitches[{i}]", -90, 90) for i, a in enumerate(sr["pitches"]))
        search = SearchPattern(**skw)

    seed = d.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"seed: expected an integer, got {seed!r}")
    return _build(
        "",
        ScenarioConfig,
        duration=duration,
        dt=dt,
        uav=pose,
        fov=fov,
        usv_start=usv,
        noise=noise,
        controller=controller,
        usv_plan=plan,
        disturbance=disturbance,
        filter=_filter(d.get("filter")),
        seed=seed,
        measurement_period=_num(d.get("measurement_period", 1.0), "measurement_period"),
        water_height=water,
        search=search,
    )


def _read_yaml(path) -> Any:
    text = Path(path).read_text()
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario document. I/O errors propagate as OSError."""
    return parse_config(_read_yaml(path))


def load_replay_config(path) -> tuple[CameraFov, NoiseConfig]:
    """Camera FOV and filter settings for replay.

    Accepts either a full scenario document or one holding only ``fov`` and
    ``filter``.
    """
    doc = _read_yaml(path)
    if isinstance(doc, Mapping) and set(doc) <= {"fov", "filter"}:
        d = _section(doc, "", ("fov", "filter"), ("fov",))
        return _fov(d["fov"]), _filter(d.get("filter"))
    cfg = parse_config(doc)
    return cfg.fov, cfg.filter


def _deg(x: float) -> float:
    return math.degrees(x)


def config_to_document(cfg: ScenarioConfig) -> dict:
    """Inverse of :func:`parse_config` (angles back to degrees)."""

    def euler(e: EulerAngles):
        return {"roll": _deg(e.roll), "pitch": _deg(e.pitch), "yaw": _deg(e.yaw)}

    def lim(x):
        return None if x is None else [_deg(x[0]), _deg(x[1])]

    doc = {
        "duration": cfg.duration,
        "dt": cfg.dt,
        "measurement_period": cfg.measurement_period,
        "seed": int(cfg.seed),
        "water_height": cfg.water_height,
        "uav": {
            "position": [float(v) for v in cfg.uav.position],
            "attitude": euler(cfg.uav.attitude),
            "gimbal": euler(cfg.uav.gimbal),
        },
        "fov": {"horizontal": _deg(cfg.fov.horizontal), "vertical": _deg(cfg.fov.vertical)},
        "usv_start": {
            "position": [float(cfg.usv_start.position[0]), float(cfg.usv_start.position[1])],
            "yaw": _deg(cfg.usv_start.yaw),
            "surge": cfg.usv_start.surge,
            "sway": cfg.usv_start.sway,
        },
        "noise": {
            "pixel_sigma": cfg.noise.pixel_sigma,
            "range_sigma": cfg.noise.range_sigma,
            "miss_probability": cfg.noise.miss_probability,
            "confidence_floor": cfg.noise.confidence_floor,
            "seed": int(cfg.noise.seed),
        },
        "controller": {
            "gain_azimuth": cfg.controller.gain_azimuth,
            "gain_elevation": cfg.controller.gain_elevation,
            "pitch_limits": lim(cfg.controller.pitch_limits),
            "yaw_limits": lim(cfg.controller.yaw_limits),
            "deadband": cfg.controller.deadband,
        },
        "usv_plan": {
            "waypoints": [list(wp) for wp in cfg.usv_plan.waypoints],
            "surge": cfg.usv_plan.surge,
            "turn_rate": _deg(cfg.usv_plan.turn_rate),
            "acceptance_radius": cfg.usv_plan.acceptance_radius,
        },
        "disturbance": {
            "amplitude": cfg.disturbance.amplitude,
            "period": cfg.disturbance.period,
            "heading": _deg(cfg.disturbance.heading),
            "jitter_sigma": cfg.disturbance.jitter_sigma,
        },
        "filter": {
            "R_diag": list(cfg.filter.R_diag),
            "sigma_a": cfg.filter.sigma_a,
            "min_confidence": cfg.filter.min_confidence,
        },
    }
    if cfg.search is not None:
        doc["search"] = {"yaw_step": _deg(cfg.search.yaw_step), "pitches": [_deg(p) for p in cfg.search.pitches]}
    return doc
