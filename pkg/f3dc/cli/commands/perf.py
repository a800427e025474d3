"""
perf: throughput model of the processing array
"""
import argparse

from f3dc.cli import EXIT_OK, emit, transform_set_arg
from f3dc.config import settings
from f3dc.models.bench import PerfRow
from f3dc.models.perf import HardwareConfig, OpConvention
from f3dc.services.bench_service import load_bench_config
from f3dc.services.perf_model import density_comparison, fpa_estimate, throughput_model
from f3dc.services.reports import render_table, write_csv


def perf_row(profile: str, hw: HardwareConfig, k: int, s: int, r: int, target_gops: float) -> PerfRow:
    report = throughput_model(hw, k, s, r)
    return PerfRow(
        profile=profile,
        dsp_total=hw.dsp_total,
        clock_hz=hw.clock_hz,
        peak_mult_rate=report.peak_mult_rate,
        equiv_valid_gops=report.equiv_valid_gops,
        equiv_zim_gops=report.equiv_zim_gops,
        target_gops=target_gops,
        utilization_valid=report.utilization_for(target_gops, OpConvention.VALID),
        utilization_zim=report.utilization_for(target_gops, OpConvention.ZIM),
        density=report.density_for(target_gops),
    )


def cmd_perf(args: argparse.Namespace) -> int:
    target = settings.target_gops if args.target_gops is None else args.target_gops
    default_hw = HardwareConfig.from_settings()
    rows = [perf_row("default", default_hw, args.k, args.s, args.r, target)]

    overrides = {
        "dsp_total": args.dsp,
        "clock_hz": args.clock,
        "fpu_count": args.fpus,
        "multipliers_per_fpu": args.multipliers,
    }
    hw = default_hw
    if any(value is not None for value in overrides.values()):
        hw = HardwareConfig.from_settings(**overrides)
        rows.append(perf_row("override", hw, args.k, args.s, args.r, target))

    emit(render_table(rows, title=f"throughput k={args.k} s={args.s} r={args.r}"))
    emit("\n")
    emit(render_table(density_comparison(target, hw.dsp_total), title="performance density (GOPS/DSP)"))

    if args.config:
        ts = transform_set_arg(args.transform_set)
        config = load_bench_config(args.config, ts)
        estimates = [fpa_estimate(layer, ts, hw) for layer in config.layers]
        emit("\n")
        emit(render_table(estimates, title=f"ideal array schedule ({hw.fpa_rows}x{hw.fpa_cols} FPUs)"))

    if args.csv:
        write_csv(rows, args.csv)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("perf", help="throughput, utilization and density estimates")
    parser.add_argument("--target-gops", type=float, help="achieved GOPS to derive utilization from")
    parser.add_argument("--dsp", type=int, help="override the DSP count")
    parser.add_argument("--clock", type=float, help="override the clock in Hz")
    parser.add_argument("--fpus", type=int, help="override the FPU count")
    parser.add_argument("--multipliers", type=int, help="override multipliers per FPU")
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--s", type=int, default=2)
    parser.add_argument("--r", type=int, default=3)
    parser.add_argument("--config", help="TOML layer suite to schedule on the array")
    parser.add_argument("--transform-set", help="transform set file (default: built-in)")
    parser.add_argument("--csv", help="also write the throughput rows as CSV")
    parser.set_defaults(handler=cmd_perf)
