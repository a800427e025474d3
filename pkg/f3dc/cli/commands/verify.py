"""
verify: every layer of a suite through all paths, compared with zero insertion
"""
import argparse

import structlog

from f3dc.cli import EXIT_FAILED, EXIT_OK, add_suite_arguments, emit, transform_set_arg
from f3dc.services.bench_service import DEFAULT_VERIFY_CONFIG, apply_overrides, load_bench_config, run_verify
from f3dc.services.reports import render_table, write_csv

logger = structlog.get_logger()


def cmd_verify(args: argparse.Namespace) -> int:
    ts = transform_set_arg(args.transform_set)
    config = load_bench_config(args.config, ts)
    config = apply_overrides(config, seed=args.seed, threads=args.threads)
    rows = run_verify(config, ts)

    passed = sum(row.passed for row in rows)
    emit(render_table(rows, title=f"verify seed={config.seed} transform_set={ts.name}"))
    emit(f"{passed}/{len(rows)} layers passed\n")
    if args.csv:
        write_csv(rows, args.csv)

    if passed != len(rows):
        logger.warning("verify_failed", failed=[row.layer for row in rows if not row.passed])
        return EXIT_FAILED
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="check the fast paths against the oracles")
    add_suite_arguments(parser, DEFAULT_VERIFY_CONFIG)
    parser.set_defaults(handler=cmd_verify)
