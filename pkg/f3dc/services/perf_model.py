"""
Analytical complexity and throughput model

All complexity figures are exact rationals; conversion to decimals happens
only when reports are rendered.
"""
from fractions import Fraction

import structlog

from f3dc.errors import GeometryError
from f3dc.models.geometry import LayerSpec
from f3dc.models.perf import ComplexityRow, DesignDensity, FpaEstimate, HardwareConfig, ThroughputReport
from f3dc.models.transform import TransformSet
from f3dc.services.engine_service import plan_tiles

logger = structlog.get_logger()

TABLE1_KERNELS = (3, 4, 5, 9)
TABLE1_STRIDE = 2
TABLE1_ORDER = 3

# (design, GOPS, DSP) as reported; the IOM design's figure is normalized to
# exclude zero operations.
REPORTED_DESIGNS = (
    ("fft_3d_cnn", 864.1, 1536),
    ("winograd_transposed_conv", 482.4, 2520),
    ("iom_3d_deconv", 450.0, 2304),
)


def _check(k: int, s: int, r: int) -> None:
    if k < 1 or s < 1 or r < 1:
        raise GeometryError(f"k, s and r must be >= 1, got k={k}, s={s}, r={r}")


def mu(k: int, s: int, r: int) -> Fraction:
    """Multiplies per output: [k + (r-1)s]^3 / (rs)^3."""
    _check(k, s, r)
    return Fraction((k + (r - 1) * s) ** 3, (r * s) ** 3)


def winograd_based(k: int, s: int) -> Fraction:
    """Per-output multiplies of the 2D-Winograd-derived comparison method, (k/s)^3 (inferred)."""
    _check(k, s, 1)
    return Fraction(k, s) ** 3


def speedup_vs_zim(k: int, s: int, r: int) -> Fraction:
    return Fraction(k ** 3) / mu(k, s, r)


def complexity_row(k: int, s: int, r: int) -> ComplexityRow:
    return ComplexityRow(
        k=k,
        s=s,
        r=r,
        zim=Fraction(k ** 3),
        winograd_based=winograd_based(k, s),
        f3dc=mu(k, s, r),
        speedup_vs_zim=speedup_vs_zim(k, s, r),
    )


def table1() -> list[ComplexityRow]:
    return [complexity_row(k, TABLE1_STRIDE, TABLE1_ORDER) for k in TABLE1_KERNELS]


def throughput_model(hw: HardwareConfig, k: int, s: int, r: int) -> ThroughputReport:
    """Peak equivalent GOPS of `hw` when every multiplier runs EWMM for (k, s, r)."""
    m = mu(k, s, r)
    peak = hw.dsp_total * hw.clock_hz
    valid_per_mult = Fraction(k ** 3, s ** 3) / m
    zim_per_mult = Fraction(k ** 3) / m
    return ThroughputReport(
        k=k,
        s=s,
        r=r,
        dsp_total=hw.dsp_total,
        clock_hz=hw.clock_hz,
        peak_mult_rate=peak,
        equiv_valid_gops=peak * float(valid_per_mult) * 2 / 1e9,
        equiv_zim_gops=peak * float(zim_per_mult) * 2 / 1e9,
    )


def fpa_estimate(layer: LayerSpec, ts: TransformSet, hw: HardwareConfig) -> FpaEstimate:
    """
    Ideal latency of `layer` on the FPU array.

    Each round feeds fpa_rows input channels and fpa_cols output channels of
    one tile to the array; an FPU consumes one E_r^3 tile-channel product per
    ceil(E_r^3 / multipliers_per_fpu) cycles. Pipeline fill and memory stalls
    are not modelled.
    """
    plan = plan_tiles(layer, ts)
    e3 = ts.e_r ** 3
    rounds = plan.tile_count * -(-layer.c_in // hw.fpa_rows) * -(-layer.c_out // hw.fpa_cols)
    cycles = rounds * -(-e3 // hw.multipliers_per_fpu)
    latency = cycles / hw.clock_hz

    g = layer.geom
    outputs = layer.c_in * layer.c_out * g.o ** 3
    valid_ops = 2 * outputs * Fraction(g.k ** 3, g.s ** 3)
    zim_ops = 2 * outputs * g.k ** 3
    useful = plan.tile_count * e3 * layer.c_in * layer.c_out
    estimate = FpaEstimate(
        layer=layer.name,
        rounds=rounds,
        cycles=cycles,
        latency_s=latency,
        valid_gops=float(valid_ops) / latency / 1e9,
        zim_gops=zim_ops / latency / 1e9,
        multiplier_utilization=useful / (cycles * hw.multipliers),
    )
    logger.debug("fpa_estimated", layer=layer.name, rounds=rounds, cycles=cycles)
    return estimate


def density_comparison(f3dc_gops: float, f3dc_dsp: int) -> list[DesignDensity]:
    """GOPS/DSP of the reported designs next to the F3DC figure, with F3DC's gain over each."""
    own = f3dc_gops / f3dc_dsp
    rows = [
        DesignDensity(design=name, gops=gops, dsp=dsp, density=gops / dsp, f3dc_gain=own / (gops / dsp))
        for name, gops, dsp in REPORTED_DESIGNS
    ]
    rows.append(DesignDensity(design="f3dc", gops=f3dc_gops, dsp=f3dc_dsp, density=own, f3dc_gain=1.0))
    return rows
