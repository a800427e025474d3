"""
F3DC command-line entry point

Subcommands: verify | complexity | perf | bench | run.
Exit codes: 0 success, 1 verification failure, 2 usage/config/input error.
"""
import argparse
import logging
import sys

import structlog
from pydantic import ValidationError

from f3dc import __version__
from f3dc.cli import EXIT_USAGE
from f3dc.cli.commands import COMMANDS
from f3dc.config import settings
from f3dc.errors import F3DCError

logger = structlog.get_logger()


def configure_logging(debug: bool = settings.debug) -> None:
    """stdlib logging on stderr with structlog on top; stdout is reserved for reports."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
        force=True,
    )
    renderer = (
        structlog.dev.ConsoleRenderer(colors=False)
        if settings.log_format == "console"
        else structlog.processors.JSONRenderer()
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="f3dc", description="Fast 3D transposed convolution toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--debug", action="store_true", default=settings.debug, help="debug-level logs")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.debug)

    try:
        return args.handler(args)
    except (F3DCError, ValidationError, OSError) as e:
        logger.error("command_failed", command=args.command, error=str(e), error_type=type(e).__name__)
        sys.stderr.write(f"f3dc {args.command}: {e}\n")
        return EXIT_USAGE
