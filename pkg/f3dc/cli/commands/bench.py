"""
bench: wall-clock of F3DC against zero insertion
"""
import argparse

from f3dc.cli import EXIT_OK, add_suite_arguments, emit, transform_set_arg
from f3dc.services.bench_service import DEFAULT_BENCH_CONFIG, apply_overrides, load_bench_config, run_bench
from f3dc.services.reports import render_table, write_csv


def cmd_bench(args: argparse.Namespace) -> int:
    ts = transform_set_arg(args.transform_set)
    config = load_bench_config(args.config, ts)
    config = apply_overrides(config, seed=args.seed, repetitions=args.repetitions, threads=args.threads)
    rows = run_bench(config, ts)
    emit(render_table(rows, title=f"bench repetitions={config.repetitions} (median, 1 warm-up)"))
    if args.csv:
        write_csv(rows, args.csv)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="time F3DC against zero insertion")
    add_suite_arguments(parser, DEFAULT_BENCH_CONFIG)
    parser.add_argument("--repetitions", type=int, help="override the config repetitions")
    parser.set_defaults(handler=cmd_bench)
