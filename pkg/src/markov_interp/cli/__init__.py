"""Command-line interface for markov-interp."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import List, Optional

from markov_interp.core import Workbench
from markov_interp.core.errors import (
    MarkovInterpError,
    NumericalError,
    SolverInfeasibleError,
)
from markov_interp.core.io import dumps_json
from markov_interp.core.presets import apply_preset, find_preset
from markov_interp.paths import get_default_config_path

from . import commands
from .arguments import CLIOptions, parse_args, print_help

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_NUMERICAL = 2


def show_config(bench: Workbench, config: Optional[str]) -> int:
    """Display configuration file path and contents."""
    config_path = Path(config) if config else get_default_config_path()
    bench.logger.info(f"Configuration file: {config_path}")
    if config_path.exists():
        bench.logger.info("\nCurrent configuration:")
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                bench.logger.info(f.read())
        except OSError as e:  # pragma: no cover - just logging
            bench.logger.error(f"\nError reading config file: {e}")
    else:
        bench.logger.info("\nConfiguration file does not exist, using defaults.")
    return EXIT_OK


def numerical_diagnostic(exc: NumericalError) -> str:
    """One-line JSON object describing a numerical failure."""
    diagnostic = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SolverInfeasibleError) and exc.solution is not None:
        diagnostic["solution"] = exc.solution.to_dict()
    return dumps_json(diagnostic, indent=None).rstrip("\n")


def run(args: CLIOptions) -> int:
    """Dispatch parsed options to a subcommand and map failures to exit codes."""
    bench = Workbench(config_path=args.config, debug=args.debug)

    if args.preset:
        preset = find_preset(bench.config, args.preset)
        if preset is None:
            bench.logger.error(f"Preset '{args.preset}' not found")
            return EXIT_USER_ERROR
        apply_preset(preset, args)

    if args.show_config:
        return show_config(bench, args.config)

    if args.command is None:
        print_help()
        return EXIT_USER_ERROR

    bench.logger.debug(f"Running {args.command}")
    try:
        return commands.COMMANDS[args.command](bench, args)
    except NumericalError as e:
        bench.logger.error(f"{args.command} failed: {e}")
        print(numerical_diagnostic(e), file=sys.stderr)
        return EXIT_NUMERICAL
    except (MarkovInterpError, ValueError) as e:
        bench.logger.error(str(e))
        return EXIT_USER_ERROR
    except OSError as e:
        target = e.filename or ""
        bench.logger.error(f"{e.strerror or e}: {target}".rstrip(": "))
        return EXIT_USER_ERROR


def _reconfigure_utf8(stream) -> None:
    """Reconfigure a single text stream to UTF-8 in place, if it supports it."""
    reconfigure = getattr(stream, "reconfigure", None)
    if reconfigure is None:
        return
    try:
        reconfigure(encoding="utf-8", errors="replace")
    except (ValueError, OSError):  # pragma: no cover - detached/odd streams
        pass


def configure_console_utf8() -> None:
    """Force UTF-8 on stdout/stderr so output does not follow the locale codepage."""
    _reconfigure_utf8(sys.stdout)
    _reconfigure_utf8(sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Synchronous entry point for the CLI."""
    configure_console_utf8()
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USER_ERROR

    try:
        return run(args)
    except KeyboardInterrupt:
        print("Operation cancelled by user", file=sys.stderr)
        return EXIT_USER_ERROR


__all__ = [
    "main",
    "run",
    "parse_args",
    "CLIOptions",
    "commands",
    "show_config",
    "numerical_diagnostic",
    "configure_console_utf8",
    "EXIT_OK",
    "EXIT_USER_ERROR",
    "EXIT_NUMERICAL",
]
