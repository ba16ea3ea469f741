"""
Threshold Command
Waterfall threshold of the configured scheme: closed form for uncoded BPSK,
sampled estimator on a simulated (or stored) AWGN FER curve otherwise.
"""

import logging
import os

from waterfall.commands.context import (
    add_curve_options,
    compute_threshold,
    output_dir,
    output_format,
    require_config,
    save_curve,
    slug,
)
from waterfall.utils.serialization import threshold_record, write_threshold_report

logger = logging.getLogger(__name__)


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "threshold",
        parents=[parent],
        help="compute the waterfall threshold of a scheme",
    )
    add_curve_options(parser)
    parser.set_defaults(handler=run)


def run(args, settings) -> int:
    config = require_config(args)
    scheme = config.scheme_spec
    out = output_dir(args, config, settings)
    fmt = output_format(args, config)
    base = os.path.join(out, slug(scheme))

    # the measured curve is kept even when no threshold can be extracted from it
    result, _ = compute_threshold(
        args, config, scheme, settings,
        on_curve=lambda curve: save_curve(f"{base}_awgn_fer", curve, fmt),
    )

    suffix = "json" if fmt == "structured" else "txt"
    report = write_threshold_report(f"{base}_threshold.{suffix}", result, structured=fmt == "structured")
    logger.info("threshold report written to %s", report)

    print(f"Waterfall threshold, {scheme.describe()}")
    for key, value in threshold_record(result):
        if value:
            print(f"  {key:15s} {value}")
    return 0
