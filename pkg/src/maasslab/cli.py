"""Command-line entry point: one subcommand per check group, plus run-all."""

from __future__ import annotations

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from config.settings import settings
from maasslab.errors import (
    ConfigError,
    InsufficientDataError,
    SpectrumParseError,
    SpectrumValidationError,
)
from maasslab.models import RunConfig
from maasslab.utils.logger import setup_logger

SUBCOMMANDS = (
    "gamma-audit",
    "weights-audit",
    "afe-check",
    "bessel-lemmas",
    "kuznetsov-residual",
    "voronoi-audit",
    "diagonal",
    "offdiag",
    "run-all",
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2

INPUT_ERRORS = (ConfigError, SpectrumParseError, SpectrumValidationError, InsufficientDataError)


def _parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="maasslab",
        description="Acceptance checks for the fourth moment of level-one Hecke-Maass forms.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value run configuration file")
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--out", type=Path, help="directory for the report bundle")
    common.add_argument("--spectrum", type=Path, help="spectral table of level-one forms")
    common.add_argument("--format", choices=("json", "csv"), help="per-check report format")
    common.add_argument("--workers", type=int, help="worker processes (1 runs sequentially)")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in SUBCOMMANDS:
        subparsers.add_parser(command, parents=[common], help=f"run the {command} checks")
    return parser.parse_args(list(argv) if argv is not None else None)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """The configuration file named by ``--config`` (or the shipped default) with flag overrides.

    Raises:
        ConfigError: unreadable or invalid configuration
    """
    config = RunConfig.from_file(args.config or settings.run_config_path)
    overrides: dict[str, Any] = {}
    if args.precision is not None:
        overrides["precision_bits"] = args.precision
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.spectrum is not None:
        overrides["spectrum_path"] = args.spectrum
    if args.format is not None:
        overrides["format"] = args.format
    if args.workers is not None:
        overrides["max_workers"] = args.workers
    if not overrides:
        return config
    try:
        # model_copy(update=...) skips validation
        return RunConfig.model_validate({**config.model_dump(), **overrides})
    except ValueError as e:
        raise ConfigError(f"invalid command-line override: {e}") from e


def main(argv: Sequence[str] | None = None) -> int:
    args = _parse_args(argv)
    level = logging.DEBUG if args.verbose else settings.log_level_int
    logger = setup_logger("maasslab", level=level, log_file=settings.log_file)

    # check modules register on import, which pulls in the numerical stack
    from maasslab.core.experiments import run_all
    from maasslab.core.report_writer import print_summary

    groups = None if args.command == "run-all" else [args.command]
    try:
        config = load_run_config(args)
        bundle = run_all(config, groups=groups)
    except INPUT_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_ERROR

    print_summary(bundle.results)
    logger.info(f"Report bundle written to {config.output_dir}")
    return EXIT_PASS if bundle.passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
