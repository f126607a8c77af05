"""Command-line harness: ``skylink {simulate,compare,replay,validate}``.

Exit status: 0 success, 2 configuration or input error, 3 I/O error.
Log verbosity comes from ``SKYLINK_LOG_LEVEL`` (error, warn, info, debug).
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace

from . import io as skio
from .config import ConfigError, load_config, load_replay_config
from .estimators import EkfLocalizer
from .simworld import compute_metrics, run_scenario
from .validation import LogValidationError

logger = logging.getLogger("skylink")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

DEFAULT_CHECKPOINTS = (10.0, 50.0, 100.0)

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("SKYLINK_LOG_LEVEL", "warn").strip().lower()
    logging.basicConfig(level=_LEVELS.get(level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _fail(code: int, msg: str) -> int:
    print(f"skylink: error: {msg}", file=sys.stderr)
    return code


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _checkpoints(text: str) -> tuple:
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("checkpoint list is empty")
    return values


def _load(path, seed):
    cfg = load_config(path)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg


def cmd_simulate(args) -> int:
    try:
        cfg = _load(args.config, args.seed)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read config: {exc}")
    trace = run_scenario(cfg)
    try:
        skio.write_trace(args.output, trace)
        if args.log:
            skio.write_measurement_log(args.log, trace)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    logger.info("wrote %d trace rows to %s", len(trace), args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        cfg = _load(args.config, args.seed)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read config: {exc}")
    for cp in args.checkpoints:
        if not 0.0 <= cp <= cfg.duration:
            return _fail(EXIT_CONFIG, f"checkpoints: {cp:g} s outside [0, {cfg.duration:g}] s")
    report = compute_metrics(run_scenario(cfg), args.checkpoints)
    try:
        skio.write_metrics(args.output, report)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        fov, filt = load_replay_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read config: {exc}")
    try:
        log = skio.read_measurement_log(args.log)
    except LogValidationError as exc:
        return _fail(EXIT_CONFIG, f"{args.log}: {exc}")
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot read log: {exc}")
    loc = EkfLocalizer(
        fov_deg=(math.degrees(fov.horizontal), math.degrees(fov.vertical)),
        R_diag=filt.R_diag,
        sigma_a=filt.sigma_a,
        min_confidence=filt.min_confidence,
    )
    try:
        loc.fit(log)
    except LogValidationError as exc:
        return _fail(EXIT_CONFIG, f"{args.log}: {exc}")
    try:
        skio.write_replay(args.output, log[:, 0], loc.estimates_, loc.covariance_diag_)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        load_config(args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot read config: {exc}")
    print(f"{args.config}: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skylink", description="UAV-assisted USV geolocation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write the trace CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=_u64)
    p.add_argument("--log", help="also write the consumed detections as a measurement log")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="EKF vs mean filter vs no filter at checkpoints")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=_u64)
    p.add_argument("--checkpoints", type=_checkpoints, default=DEFAULT_CHECKPOINTS, help="e.g. 10,50,100")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("replay", help="run the EKF over a recorded measurement log")
    p.add_argument("--log", required=True)
    p.add_argument("--config", required=True, help="document with fov and filter sections")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("validate", help="parse and validate a scenario config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
