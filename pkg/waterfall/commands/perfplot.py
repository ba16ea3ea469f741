"""
Perfplot Command
Normalized detection-probability curves P_d / gamma^2 and the ideal 1 / gamma^2
envelope, one file per frame length, optionally with P_e / gamma^2 beside
them. A larger area under the P_d curve means a lower waterfall threshold.
"""

import logging
import os
from typing import List

import numpy as np

from waterfall.commands.context import awgn_curve, output_dir, require_config, slug
from waterfall.models.codes import SchemeSpec
from waterfall.models.curves import DetectionCurve
from waterfall.models.simulation import FerCurve
from waterfall.services.fer_model import normalized_area, normalized_detection_curve, normalized_error_curve
from waterfall.services.link import uncoded_pd
from waterfall.utils.errors import ConfigError
from waterfall.utils.serialization import fmt, write_normalized_curve, write_rows

logger = logging.getLogger(__name__)


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "perfplot",
        parents=[parent],
        help="write normalized detection-probability curves",
    )
    parser.add_argument("--lengths", help="comma-separated frame lengths, e.g. 256,1024")
    parser.add_argument("--curve", help="stored AWGN FER curve CSV (single frame length)")
    parser.add_argument("--gamma-step", type=float, default=0.01, help="analytic grid step (linear)")
    parser.add_argument("--gamma-stop", type=float, default=100.0, help="analytic grid end (linear)")
    parser.add_argument(
        "--error-curves",
        action="store_true",
        help="also write P_e/gamma^2 beside each P_d/gamma^2 file",
    )
    parser.set_defaults(handler=run)


def parse_lengths(text: str) -> List[int]:
    try:
        lengths = [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise ConfigError(f"--lengths must be integers, got {text!r}") from exc
    if not lengths or any(L < 1 for L in lengths):
        raise ConfigError(f"--lengths must be positive integers, got {text!r}")
    return lengths


def analytic_curve(frame_length: int, step: float, stop: float) -> DetectionCurve:
    if step <= 0.0 or stop <= step:
        raise ConfigError("analytic grid needs 0 < gamma-step < gamma-stop")
    gammas = step * np.arange(1, int(np.floor(stop / step + 1e-9)) + 1)
    return DetectionCurve(
        points=list(zip(gammas.tolist(), uncoded_pd(gammas, frame_length).tolist())),
        source="analytic",
        label=f"uncoded L={frame_length}",
    )


def measured_curve(curve: FerCurve, scheme: SchemeSpec) -> DetectionCurve:
    """P_d = 1 - fer from an AWGN curve"""
    return DetectionCurve(
        points=[(p.snr, 1.0 - p.fer) for p in curve.points],
        source="monte_carlo",
        label=scheme.describe(),
    )


def run(args, settings) -> int:
    config = require_config(args)
    base_scheme = config.scheme_spec
    out = output_dir(args, config, settings)

    if args.curve and args.lengths:
        raise ConfigError("--curve describes one frame length; drop --lengths")
    lengths = parse_lengths(args.lengths) if args.lengths else [base_scheme.frame_length]

    areas = []
    envelope_written = False
    for L in lengths:
        scheme = base_scheme.with_frame_length(L)
        if scheme.kind == "uncoded" and not args.curve:
            detection = analytic_curve(L, args.gamma_step, args.gamma_stop)
        else:
            detection = measured_curve(awgn_curve(args, config, scheme, settings), scheme)

        normalized = normalized_detection_curve(detection)
        write_normalized_curve(os.path.join(out, f"{slug(scheme)}_normalized.csv"), normalized)
        if args.error_curves:
            write_normalized_curve(
                os.path.join(out, f"{slug(scheme)}_error_normalized.csv"),
                normalized_error_curve(detection),
            )
        if not envelope_written:
            write_normalized_curve(os.path.join(out, "envelope.csv"), normalized, envelope=True)
            envelope_written = True
        area = normalized_area(normalized)
        areas.append((scheme, area))
        logger.info("%s: area %.6g", scheme.describe(), area)

    write_rows(
        os.path.join(out, f"{base_scheme.kind}_areas.csv"),
        ["frame_length", "area", "gamma_w_estimate_db"],
        [
            [str(s.frame_length), fmt(a), fmt(10.0 * np.log10(1.0 / a))]
            for s, a in areas
        ],
    )

    print("Area under P_d/gamma^2 (larger is better; 1/area estimates gamma_w)")
    for scheme, area in areas:
        print(f"  {scheme.describe():45s} {area:10.5f}  gamma_w ~ {10.0 * np.log10(1.0 / area):7.3f} dB")
    return 0
