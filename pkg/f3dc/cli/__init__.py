"""
Command-line front end
"""
import sys

from f3dc.config import settings
from f3dc.models.transform import TransformSet
from f3dc.services.transform_service import resolve_transform_set

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def emit(text: str) -> None:
    """Reports go to stdout; logs go to stderr."""
    sys.stdout.write(text)
    sys.stdout.flush()


def threads_arg(value: int | None) -> int:
    return settings.threads if value is None else value


def transform_set_arg(path: str | None) -> TransformSet:
    return resolve_transform_set(path)


def add_suite_arguments(parser, default_config) -> None:
    """Flags shared by the suite-driven commands (verify, bench)."""
    parser.add_argument("--config", default=str(default_config), help="TOML layer suite")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--threads", type=int, help="engine worker threads")
    parser.add_argument("--csv", help="also write the report as CSV")
    parser.add_argument("--transform-set", help="transform set file (default: built-in)")
