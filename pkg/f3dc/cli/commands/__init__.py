"""
Subcommands; each module exposes register(subparsers)
"""
from f3dc.cli.commands import bench, complexity, perf, run, verify

COMMANDS = (verify, complexity, perf, bench, run)
