"""
Simulate Command
Monte-Carlo FER on the quasi-static fading channel over the [fading] grid,
with Wilson confidence bounds per point.
"""

import logging
import os

from waterfall.commands.context import output_dir, output_format, require_config, save_curve, seed_for, slug
from waterfall.services.montecarlo import measure_qsf_fer, wilson_bounds

logger = logging.getLogger(__name__)


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "simulate",
        parents=[parent],
        help="measure FER on the quasi-static fading channel",
    )
    parser.add_argument("--frames", type=int, help="frames per average-SNR point")
    parser.add_argument("--confidence", type=float, default=0.95, help="Wilson interval level")
    parser.set_defaults(handler=run)


def run(args, settings) -> int:
    config = require_config(args)
    scheme = config.scheme_spec
    grid = config.fading.grid()
    frames = args.frames or config.fading.frames_per_point
    seed = seed_for(args, config)
    out = output_dir(args, config, settings)

    curve = measure_qsf_fer(
        scheme,
        grid,
        frames,
        seed,
        workers=settings.workers,
        batch_size=settings.batch_size,
        progress=settings.progress,
    )
    bounds = wilson_bounds(curve, args.confidence)
    path = save_curve(os.path.join(out, f"{slug(scheme)}_qsf_fer"), curve, output_format(args, config), bounds)
    logger.info("QSF curve written to %s", path)

    print(f"Quasi-static fading FER, {scheme.describe()}, seed {seed}")
    print(f"  {'avg dB':>7s} {'frames':>7s} {'errors':>7s} {'fer':>10s}  {args.confidence:.0%} interval")
    for point, (low, high) in zip(curve.points, bounds):
        print(
            f"  {point.snr_db:7.2f} {point.frames_sent:7d} {point.frame_errors:7d} "
            f"{point.fer:10.4e}  [{low:.4e}, {high:.4e}]"
        )
    return 0
