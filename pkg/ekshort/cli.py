"""Command-line entry point: one subcommand per experiment."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ekshort.exporters.csv_exporter import build_csv_payload, write_csv, write_manifest
from ekshort.models.experiment import ExperimentConfig, ExperimentOutcome, RunManifest
from ekshort.models.window import FULL, Mode, Sampling
from ekshort.services import experiments, ladder, selftest
from ekshort.settings import LOG_FORMAT, TOOL_NAME, TOOL_VERSION, Settings, load_run_config
from ekshort.utils import rng
from ekshort.utils.constants import (
    CSV_SCHEMA_VERSION,
    DEFAULT_PRIME_CUTOFF,
    DISTANCE_EPSILON,
    ETA_DEFAULT,
    SUBCOMMANDS,
    THETA_MAPS,
    ThetaMap,
)
from ekshort.utils.validators import ParameterError, parse_float_list, parse_magnitude

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARAMETER = 2

DEFAULT_CHARFN_TAUS = "-5,-4,-3,-2,-1.5,-1,-0.5,-0.25,0,0.25,0.5,1,1.5,2,3,4,5"
_BOOL_DESTS = ("esseen", "strict", "allow_empty_interval")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

REQUIRED: Dict[str, Tuple[str, ...]] = {
    "theorem1": ("X", "h"),
    "theorem2": ("X", "h", "k"),
    "prop1": ("X", "h"),
    "sd-check": ("X",),
    "ladder": ("X", "h"),
    "distance": ("theta",),
    "rvh": ("X",),
    "charfn": ("X",),
}


def _magnitude(text: str) -> int:
    try:
        return parse_magnitude(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _magnitude_list(text: str) -> List[int]:
    try:
        return [parse_magnitude(item.strip()) for item in str(text).split(",") if item.strip()]
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _float_list(text: str) -> List[float]:
    try:
        return parse_float_list(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, settings: Settings) -> None:
    sub.add_argument("--out", default=None, help="output stem: writes <out>.csv and <out>.json")
    sub.add_argument("--seed", type=_magnitude, default=None, help="64-bit seed (drawn from entropy if omitted)")
    sub.add_argument("--threads", type=_magnitude, default=settings.threads)
    sub.add_argument("--log-level", dest="log_level", type=str.upper, choices=LOG_LEVELS, default=settings.log_level)
    sub.add_argument("--config", default=None, help="flat key=value or YAML file of option defaults")
    sub.add_argument("--sampled", type=_magnitude, default=None, help="sample COUNT integers for dyadic references")


def _add_window(sub: argparse.ArgumentParser, *, h_default: Optional[int] = None) -> None:
    sub.add_argument("--X", type=_magnitude, default=None)
    sub.add_argument("--h", type=_magnitude, default=h_default)
    sub.add_argument("--samples", type=_magnitude, default=1)


def build_parser(
    settings: Optional[Settings] = None, config_defaults: Optional[Dict[str, Dict[str, Any]]] = None
) -> argparse.ArgumentParser:
    """The full parser; *config_defaults* maps a subcommand to option defaults."""

    settings = settings or Settings.from_env()
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Erdős–Kac in short intervals: desk-scale experiments.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("theorem1", help="sup-norm discrepancy of sampled windows")
    _add_window(p)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--esseen", action="store_true", help="also report the three smoothing-integral pieces")

    p = subs.add_parser("theorem2", help="window counts of omega(n) = k")
    _add_window(p)
    p.add_argument("--k", type=_magnitude, default=None)

    p = subs.add_parser("prop1", help="per-window integrals against the dyadic block")
    _add_window(p)
    p.add_argument("--A", type=float, default=10.0)
    p.add_argument("--B", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--theta-map", dest="theta_map", choices=THETA_MAPS, default=ThetaMap.NORMALISED)

    p = subs.add_parser("sd-check", help="dyadic means against the Selberg–Delange main term")
    p.add_argument("--X", type=_magnitude, default=None)
    p.add_argument("--t", type=_float_list, default=[0.3, 0.7, 1.0])
    p.add_argument("--prime-cutoff", dest="prime_cutoff", type=_magnitude, default=DEFAULT_PRIME_CUTOFF)

    p = subs.add_parser("ladder", help="complement density of the default ladder")
    p.add_argument("--X", type=_magnitude, default=None)
    p.add_argument("--h", type=_magnitude, default=None)
    p.add_argument("--delta", type=_float_list, default=[0.4, 1.0, 2.0])
    p.add_argument("--eta", type=float, default=ETA_DEFAULT)
    p.add_argument("--strict", action="store_true", help="enforce the (log Q1)^(40/eta) floor")

    p = subs.add_parser("distance", help="restricted pretentious distance and its lower-bound shape")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--x", type=_magnitude_list, default=[10**5, 10**6, 10**7])
    p.add_argument("--eps", type=float, default=DISTANCE_EPSILON)

    p = subs.add_parser("rvh", help="Dirichlet sums R_{v,H}(u) over the ladder set")
    p.add_argument("--X", type=_magnitude, default=None)
    p.add_argument("--u", type=_float_list, default=None)
    p.add_argument("--v", type=float, default=None)
    p.add_argument("--H", type=float, default=None)
    p.add_argument("--P", type=float, default=None)
    p.add_argument("--Q", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--logP1", type=float, default=None)
    p.add_argument("--logQ1", type=float, default=None)
    p.add_argument("--allow-empty-interval", dest="allow_empty_interval", action="store_true")

    p = subs.add_parser("charfn", help="characteristic function of one window against phi_X")
    _add_window(p, h_default=10**4)
    p.add_argument("--tau", type=_float_list, default=_float_list(DEFAULT_CHARFN_TAUS))

    subs.add_parser("selftest", help="run the invariant suite")

    for name in SUBCOMMANDS:
        _add_common(subs.choices[name], settings)
    for name, values in (config_defaults or {}).items():
        sub = subs.choices[name]
        unknown = sorted(set(values) - set(vars(sub.parse_args([]))))
        if unknown:
            parser.error(f"unknown config keys for {name}: {', '.join(unknown)}")
        sub.set_defaults(**values)
    return parser


def _coerce_config(values: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(values)
    for key in _BOOL_DESTS:
        if key in out and isinstance(out[key], str):
            out[key] = out[key].strip().lower() in ("1", "true", "yes", "on")
    return out


def parse_args(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> argparse.Namespace:
    """Parse *argv*; values from ``--config`` become defaults that flags override."""

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser(settings)
    args = parser.parse_args(argv)
    if args.config:
        values = _coerce_config(load_run_config(args.config))
        for key in ("config", "subcommand"):
            values.pop(key, None)
        parser = build_parser(settings, {args.subcommand: values})
        args = parser.parse_args(argv)
    # Defaults from --config skip argparse's choices check.
    args.log_level = str(args.log_level).upper()
    if args.log_level not in LOG_LEVELS:
        parser.error(f"--log-level: invalid choice {args.log_level!r} (choose from {', '.join(LOG_LEVELS)})")
    missing = [f"--{dest}" for dest in REQUIRED.get(args.subcommand, ()) if getattr(args, dest) is None]
    if missing:
        parser.error(f"{args.subcommand}: missing {', '.join(missing)}")
    return args


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def _mode(args: argparse.Namespace) -> Mode:
    return FULL if args.sampled is None else Sampling(count=args.sampled, seed=args.seed)


def _experiment_config(args: argparse.Namespace, **extra: Any) -> ExperimentConfig:
    return ExperimentConfig(
        X=args.X,
        h=args.h,
        samples=args.samples,
        seed=args.seed,
        threads=args.threads,
        sampled=args.sampled,
        **extra,
    )


def _run_theorem1(args: argparse.Namespace) -> ExperimentOutcome:
    cfg = _experiment_config(args, threshold=args.threshold, alpha=args.alpha, esseen=args.esseen)
    return experiments.run_theorem1(cfg)


def _run_theorem2(args: argparse.Namespace) -> ExperimentOutcome:
    return experiments.run_theorem2(_experiment_config(args, k=args.k))


def _run_prop1(args: argparse.Namespace) -> ExperimentOutcome:
    cfg = _experiment_config(args, A=args.A, B=args.B, delta=args.delta, theta_map=args.theta_map)
    return experiments.run_prop1(cfg)


def _run_sd_check(args: argparse.Namespace) -> ExperimentOutcome:
    return experiments.run_sd_check(args.X, args.t, _mode(args), args.prime_cutoff)


def _run_ladder(args: argparse.Namespace) -> ExperimentOutcome:
    return experiments.run_ladder_density(args.X, args.h, args.delta, _mode(args), eta=args.eta, strict=args.strict)


def _run_distance(args: argparse.Namespace) -> ExperimentOutcome:
    return experiments.run_distance(args.theta, args.alpha, args.x, args.eps)


def _run_rvh(args: argparse.Namespace) -> ExperimentOutcome:
    us = args.u if args.u is not None else [math.log(args.X) ** (1.0 / 15.0)]
    L = None
    if args.logP1 is not None or args.logQ1 is not None:
        if args.logP1 is None or args.logQ1 is None:
            raise ParameterError("--logP1 and --logQ1 must be given together")
        L = ladder.build_ladder(args.X, args.logP1, args.logQ1, strict=False)
    return experiments.run_rvh(
        args.X,
        us,
        v=args.v,
        H=args.H,
        P=args.P,
        Q=args.Q,
        theta=args.theta,
        ladder=L,
        allow_empty_interval=args.allow_empty_interval,
    )


def _run_charfn(args: argparse.Namespace) -> ExperimentOutcome:
    return experiments.run_charfn(_experiment_config(args), args.tau)


def _run_selftest(args: argparse.Namespace) -> ExperimentOutcome:
    return selftest.run_selftest()


RUNNERS: Dict[str, Callable[[argparse.Namespace], ExperimentOutcome]] = {
    "theorem1": _run_theorem1,
    "theorem2": _run_theorem2,
    "prop1": _run_prop1,
    "sd-check": _run_sd_check,
    "ladder": _run_ladder,
    "distance": _run_distance,
    "rvh": _run_rvh,
    "charfn": _run_charfn,
    "selftest": _run_selftest,
}


def _resolved_config(args: argparse.Namespace) -> Dict[str, Any]:
    config = {key: value for key, value in vars(args).items() if key not in ("config", "log_level")}
    return {key: (value.tolist() if isinstance(value, np.ndarray) else value) for key, value in config.items()}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run(args: argparse.Namespace) -> ExperimentOutcome:
    """Run the chosen experiment and write ``<out>.csv`` plus ``<out>.json``."""

    if args.seed is None:
        args.seed = rng.entropy_seed()
        logger.info("No --seed given; drew %d from entropy", args.seed)
    started = _now()
    outcome = RUNNERS[args.subcommand](args)
    finished = _now()

    out = Path(args.out or args.subcommand.replace("-", "_"))
    payload = build_csv_payload(outcome, out.name)
    csv_path = write_csv(payload, out.parent)
    manifest = RunManifest(
        tool_version=TOOL_VERSION,
        csv_schema=CSV_SCHEMA_VERSION,
        subcommand=args.subcommand,
        config=_resolved_config(args),
        seed=args.seed,
        grids=outcome.grids,
        prime_cutoffs=outcome.prime_cutoffs,
        started_at=started,
        finished_at=finished,
        summary=outcome.summary,
    )
    json_path = write_manifest(manifest, out.parent / f"{out.name}.json")
    logger.info("Wrote %s and %s", csv_path, json_path)
    return outcome


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_PARAMETER
    except (ParameterError, FileNotFoundError, ValueError) as exc:
        print(f"{TOOL_NAME}: error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER

    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr, force=True)
    try:
        outcome = run(args)
    except ParameterError as exc:
        logger.error("Parameter error: %s", exc)
        return EXIT_PARAMETER
    except Exception:
        logger.exception("Run failed")
        return EXIT_INTERNAL

    if args.subcommand == "selftest" and not outcome.summary.get("passed", False):
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover - exercised through ``python -m ekshort``
    sys.exit(main())
