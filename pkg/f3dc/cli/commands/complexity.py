"""
complexity: multiplies per output of zero insertion, the Winograd-based method and F3DC
"""
import argparse

from f3dc.cli import EXIT_OK, emit
from f3dc.services.perf_model import TABLE1_ORDER, TABLE1_STRIDE, table1
from f3dc.services.reports import render_table, write_csv


def cmd_complexity(args: argparse.Namespace) -> int:
    rows = table1()
    emit(render_table(rows, title=f"multiplies per output, s={TABLE1_STRIDE}, r={TABLE1_ORDER}"))
    emit("winograd_based uses the inferred closed form (k/s)^3\n")
    if args.csv:
        write_csv(rows, args.csv)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("complexity", help="print the complexity comparison table")
    parser.add_argument("--csv", help="also write the table as CSV")
    parser.set_defaults(handler=cmd_complexity)
