"""
FER Command
Threshold-approximated FER over an average-SNR range, with the exact
fading integral alongside whenever an AWGN error curve is available.
"""

import logging
import math
import os
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from waterfall.commands.context import (
    add_curve_options,
    analytic_pe,
    compute_threshold,
    output_dir,
    output_format,
    require_config,
    slug,
)
from waterfall.models.snr import Snr, linear_to_db
from waterfall.models.threshold import WaterfallThreshold
from waterfall.services.fer_model import approx_fer, exact_fer, exact_fer_from_samples
from waterfall.utils.errors import ConfigError
from waterfall.utils.serialization import read_threshold_report, write_fer_table, write_json

logger = logging.getLogger(__name__)


class FerRow(BaseModel):
    avg_snr_db: float
    fer_approx: float
    fer_exact: Optional[float] = None


class FerTable(BaseModel):
    scheme: str
    gamma_w_db: float
    rows: List[FerRow]


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "fer",
        parents=[parent],
        help="approximate (and exact) FER on the quasi-static channel",
    )
    parser.add_argument("--avg-start-db", type=float, help="first average SNR in dB")
    parser.add_argument("--avg-stop-db", type=float, help="last average SNR in dB")
    parser.add_argument("--avg-step-db", type=float, help="average SNR increment in dB")
    parser.add_argument("--threshold-report", help="reuse gamma_w from a threshold report")
    parser.add_argument("--no-exact", action="store_true", help="skip the exact integral column")
    add_curve_options(parser)
    parser.set_defaults(handler=run)


def avg_levels(args, fading) -> List[float]:
    start = fading.avg_snr_start_db if args.avg_start_db is None else args.avg_start_db
    stop = fading.avg_snr_stop_db if args.avg_stop_db is None else args.avg_stop_db
    step = fading.avg_snr_step_db if args.avg_step_db is None else args.avg_step_db
    if step <= 0.0 or stop < start:
        raise ConfigError(f"empty average-SNR range [{start}, {stop}] step {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return (start + step * np.arange(count)).tolist()


def _threshold_from_report(path: str) -> WaterfallThreshold:
    if path.endswith(".json"):
        try:
            with open(path) as handle:
                return WaterfallThreshold.model_validate_json(handle.read())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"{path} is not a threshold report") from exc
    try:
        record = read_threshold_report(path)
        return WaterfallThreshold(
            gamma_w=Snr(value=float(record["gamma_w_linear"])),
            method=record["method"],
            inputs_digest=path,
        )
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"{path} is not a threshold report") from exc


def run(args, settings) -> int:
    config = require_config(args)
    scheme = config.scheme_spec
    levels = avg_levels(args, config.fading)
    out = output_dir(args, config, settings)
    fmt = output_format(args, config)

    curve = None
    if args.threshold_report:
        threshold = _threshold_from_report(args.threshold_report)
    else:
        threshold, curve = compute_threshold(args, config, scheme, settings)

    avg = [Snr.from_db(level) for level in levels]
    approx = [approx_fer(s, threshold) for s in avg]

    exact: Optional[List[float]] = None
    if not args.no_exact:
        pe = analytic_pe(scheme)
        if pe is not None:
            exact = [exact_fer(pe, s) for s in avg]
        elif curve is not None:
            exact = [exact_fer_from_samples(curve, s) for s in avg]
        else:
            logger.info("no AWGN error curve available; exact column omitted")

    path = os.path.join(out, f"{slug(scheme)}_fer")
    if fmt == "structured":
        table = FerTable(
            scheme=scheme.describe(),
            gamma_w_db=threshold.db,
            rows=[
                FerRow(
                    avg_snr_db=level,
                    fer_approx=approx[i],
                    fer_exact=exact[i] if exact is not None else None,
                )
                for i, level in enumerate(levels)
            ],
        )
        write_json(f"{path}.json", table)
    else:
        write_fer_table(f"{path}.csv", levels, approx, exact)

    # Eb/N0 is a display convenience only
    rate = scheme.frame_length / scheme.codeword_length
    print(f"FER on the quasi-static channel, {scheme.describe()}, gamma_w = {threshold.db:.4g} dB")
    print(f"  {'avg Es/N0 dB':>12s} {'Eb/N0 dB':>9s} {'approx':>11s} {'exact':>11s}")
    for i, level in enumerate(levels):
        exact_text = f"{exact[i]:11.4e}" if exact is not None else f"{'-':>11s}"
        eb = level - linear_to_db(rate)
        print(f"  {level:12.2f} {eb:9.2f} {approx[i]:11.4e} {exact_text}")
    return 0
