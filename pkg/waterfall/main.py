"""
Waterfall Threshold Toolkit - command line
Main application entry point: python -m waterfall.main <command>
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from waterfall.commands import fer, perfplot, simulate, threshold, validate
from waterfall.utils.errors import ConfigError, WaterfallError

logger = logging.getLogger("waterfall")


# Runtime settings from the environment; they never change numerical results
class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="WATERFALL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    out_dir: str = "results"
    workers: int = 1
    batch_size: int = 256
    log_level: str = "WARNING"
    progress: bool = True


class UsageParser(argparse.ArgumentParser):
    """Usage errors become ConfigError (exit 1) instead of argparse's exit 2"""

    def error(self, message: str):
        raise ConfigError(message, hint=f"run '{self.prog} --help'")


def common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="experiment INI file")
    parent.add_argument("--seed", type=int, help="master seed (overrides [plan] seed)")
    parent.add_argument("--out", help="output directory")
    parent.add_argument("--format", choices=["csv", "structured"], help="output format")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(
        prog="waterfall",
        description="Waterfall threshold and quasi-static fading FER toolkit",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command", parser_class=UsageParser)
    subparsers.required = True
    parent = common_options()

    # Register commands
    threshold.register(subparsers, parent)
    fer.register(subparsers, parent)
    simulate.register(subparsers, parent)
    perfplot.register(subparsers, parent)
    validate.register(subparsers, parent)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def banner(settings: Settings, command: str) -> None:
    print("=" * 50, file=sys.stderr)
    print(f"Waterfall toolkit: {command}", file=sys.stderr)
    print(f"Workers: {settings.workers}, batch size: {settings.batch_size}", file=sys.stderr)
    print("=" * 50, file=sys.stderr)


def main(argv: Optional[List[str]] = None, settings: Optional[Settings] = None) -> int:
    settings = settings or Settings()
    configure_logging(settings.log_level)
    try:
        args = build_parser().parse_args(argv)
        if settings.progress:
            banner(settings, args.command)
        return args.handler(args, settings)
    except WaterfallError as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
