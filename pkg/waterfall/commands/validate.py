"""
Validate Command
Runs the acceptance suite and prints expected vs measured per check.
Exit code 3 when any check fails.
"""

import logging
import os
from typing import List

from pydantic import RootModel

from waterfall.commands.context import output_dir, output_format
from waterfall.commands.report import create_pdf_report
from waterfall.models.acceptance import CriterionResult
from waterfall.models.experiment import load_experiment
from waterfall.services.acceptance import run_acceptance
from waterfall.utils.errors import AcceptanceFailure
from waterfall.utils.serialization import write_json, write_rows

logger = logging.getLogger(__name__)

AcceptanceTable = RootModel[List[CriterionResult]]

ACCEPTANCE_HEADER = [
    "number", "name", "expected", "measured", "tolerance",
    "runtime_s", "budget_s", "within_tolerance", "within_budget", "passed",
]


def register(subparsers, parent) -> None:
    parser = subparsers.add_parser(
        "validate",
        parents=[parent],
        help="run the acceptance suite",
    )
    parser.add_argument("--full", action="store_true", help="include the Monte-Carlo criteria")
    parser.add_argument("--pdf", help="also render the table to this PDF file")
    parser.set_defaults(handler=run)


def run(args, settings) -> int:
    # a broken config fails here, before anything is simulated
    config = load_experiment(args.config) if args.config else None
    seed = args.seed
    if seed is None:
        seed = config.plan.seed if config is not None and config.plan is not None else 0
    out = output_dir(args, config, settings)

    results = run_acceptance(
        full=args.full,
        seed=seed,
        workers=settings.workers,
        batch_size=settings.batch_size,
        progress=settings.progress,
    )

    if output_format(args, config) == "structured":
        write_json(os.path.join(out, "acceptance.json"), AcceptanceTable(results))
    else:
        write_rows(
            os.path.join(out, "acceptance.csv"),
            ACCEPTANCE_HEADER,
            [
                [
                    str(r.number), r.name, r.expected, r.measured, r.tolerance,
                    repr(r.runtime_s), "" if r.budget_s is None else repr(r.budget_s),
                    str(r.within_tolerance), str(r.within_budget), str(r.passed),
                ]
                for r in results
            ],
        )
    if args.pdf:
        create_pdf_report(results, args.pdf, args.full)
        logger.info("PDF report written to %s", args.pdf)

    print(f"{'#':>2s}  {'check':50s} {'expected':>24s} {'measured':>30s}  result")
    for r in results:
        print(f"{r.number:2d}  {r.name[:50]:50s} {r.expected[:24]:>24s} {r.measured[:30]:>30s}  {'PASS' if r.passed else 'FAIL'}")
    failed = [r for r in results if not r.passed]
    if failed:
        raise AcceptanceFailure(f"{len(failed)} of {len(results)} checks failed")
    if not args.full:
        print("Monte-Carlo criteria not run; use --full")
    return 0
