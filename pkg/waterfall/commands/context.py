"""
Pieces shared by the command modules: config loading, output locations,
and the AWGN curves a command can start from.
"""

import logging
import os
from typing import Callable, Optional, Tuple

from waterfall.models.codes import SchemeSpec
from waterfall.models.experiment import ExperimentConfig, load_experiment
from waterfall.models.simulation import FerCurve
from waterfall.models.threshold import WaterfallThreshold
from waterfall.services.link import uncoded_pd, uncoded_pe
from waterfall.services.montecarlo import measure_awgn_fer
from waterfall.services.threshold import DEFAULT_TAIL_FRACTION, waterfall_from_fer_samples, waterfall_from_pd
from waterfall.utils.errors import ConfigError
from waterfall.utils.serialization import read_fer_curve, write_fer_curve, write_json

logger = logging.getLogger(__name__)


def require_config(args) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("--config is required for this command")
    return load_experiment(args.config)


def output_dir(args, config: Optional[ExperimentConfig], settings) -> str:
    if args.out:
        path = args.out
    elif config is not None:
        path = config.outputs.directory
    else:
        path = settings.out_dir
    os.makedirs(path, exist_ok=True)
    return path


def output_format(args, config: Optional[ExperimentConfig]) -> str:
    if args.format:
        return args.format
    if config is not None and config.outputs.formats:
        return config.outputs.formats[0]
    return "csv"


def seed_for(args, config: ExperimentConfig) -> int:
    if args.seed is not None:
        return args.seed
    return config.plan.seed if config.plan is not None else 0


def slug(scheme: SchemeSpec) -> str:
    return f"{scheme.kind}_{scheme.frame_length}"


def save_curve(path_base: str, curve: FerCurve, fmt: str, bounds=None) -> str:
    if fmt == "structured":
        return write_json(f"{path_base}.json", curve)
    return write_fer_curve(f"{path_base}.csv", curve, bounds)


def analytic_pe(scheme: SchemeSpec) -> Optional[Callable[[float], float]]:
    if scheme.kind != "uncoded":
        return None
    return lambda g: uncoded_pe(g, scheme.frame_length)


def awgn_curve(args, config: ExperimentConfig, scheme: SchemeSpec, settings) -> FerCurve:
    """A stored curve when --curve is given, otherwise a fresh simulation on the [plan] grid"""
    if getattr(args, "curve", None):
        logger.info("using stored AWGN curve %s", args.curve)
        return read_fer_curve(args.curve, scheme=scheme.describe())
    plan = config.simulation_plan(seed_for(args, config))
    return measure_awgn_fer(
        scheme,
        plan,
        workers=settings.workers,
        batch_size=settings.batch_size,
        progress=settings.progress,
    )


def compute_threshold(
    args,
    config: ExperimentConfig,
    scheme: SchemeSpec,
    settings,
    on_curve: Optional[Callable[[FerCurve], object]] = None,
) -> Tuple[WaterfallThreshold, Optional[FerCurve]]:
    """
    Closed form for uncoded schemes, sampled estimator on an AWGN curve
    otherwise. on_curve sees the curve before the estimator can reject it.
    """
    if scheme.kind == "uncoded" and not getattr(args, "curve", None):
        L = scheme.frame_length
        floor = getattr(args, "gamma_floor", 0.0)
        threshold = waterfall_from_pd(lambda g: uncoded_pd(g, L), gamma_floor=floor, digest=scheme.describe())
        return threshold, None
    curve = awgn_curve(args, config, scheme, settings)
    if on_curve is not None:
        on_curve(curve)
    tail = getattr(args, "tail_fraction", DEFAULT_TAIL_FRACTION)
    return waterfall_from_fer_samples(curve, tail_fraction=tail), curve


def add_curve_options(parser) -> None:
    parser.add_argument("--curve", help="stored AWGN FER curve CSV to use instead of simulating")
    parser.add_argument(
        "--gamma-floor",
        type=float,
        default=0.0,
        help="lower SNR limit (linear) of the closed-form area; needed for short uncoded frames",
    )
    parser.add_argument(
        "--tail-fraction",
        type=float,
        default=DEFAULT_TAIL_FRACTION,
        help="largest FER(gamma_N)/gamma_N allowed, as a fraction of the bracketed term",
    )
    parser.add_argument(
        "--no-tail-check",
        dest="tail_fraction",
        action="store_const",
        const=None,
        help="accept curves whose high-SNR tail is truncated",
    )
