"""
Full-layer 3D transposed convolution with the fast tile transform

Dataflow (weight stationary):
1. every c_out x c_in kernel is transformed once and cached;
2. the input is cut into overlapping I_r^3 windows (zero halo on read) and
   each window is transformed once per input channel;
3. work items are (output channel, depth tile) pairs; each multiplies the
   held kernels with the input windows, reduces over c_in in ascending order,
   inverse-transforms and writes its own O_r-thick output slab;
4. the trailing overhang of the uncropped grid is cropped.

Accumulator bound (quantized path): with |activations| < 2**15, |weights| <=
2**7 and the built-in set (row norms Pt = 2, 2H = 2, At = 3) every
intermediate stays below 2**15 * 8 * 2**7 * 8 * 27 * c_in < 2**33 * c_in,
far inside int64. accumulator_bound() evaluates this for any set.
"""
import threading
import weakref
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import structlog
from numpy.lib.stride_tricks import sliding_window_view

from f3dc.config import settings
from f3dc.errors import ConfigError, ExactnessError, PhaseError, QuantizationError, ShapeError
from f3dc.models.engine import AccumulationDomain, MultiplyCount, QuantSpec, TilePlan
from f3dc.models.geometry import LayerSpec, WeightBank
from f3dc.models.tensor import ChannelVolume, ElementKind, Matrix2
from f3dc.models.transform import TransformSet
from f3dc.services.oracle_service import check_layer_operands
from f3dc.services.transform_service import (
    integer_matrices,
    kernel_operand,
    kernel_scale,
    to_exact_integers,
    transform_array,
)

logger = structlog.get_logger()

FLOAT_MANTISSA_LIMIT = 1 << 53


# ============================================
# Instrumentation and weight cache
# ============================================

class MultiplyCounter:
    """Thread-safe tally of element-wise multiplies."""

    def __init__(self):
        self._total = 0
        self._lock = threading.Lock()

    def add(self, n: int) -> None:
        with self._lock:
            self._total += n

    @property
    def total(self) -> int:
        return self._total

    def reset(self) -> None:
        with self._lock:
            self._total = 0


class TransformedWeightCache:
    """Transformed kernels keyed by (weight bank, transform set, integer-scaled)."""

    def __init__(self):
        self._entries: dict[int, tuple[weakref.ref, dict[tuple[int, bool], tuple[TransformSet, np.ndarray]]]] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _bank_entries(self, w: WeightBank) -> dict[tuple[int, bool], tuple[TransformSet, np.ndarray]]:
        slot = self._entries.get(id(w))
        if slot is None or slot[0]() is not w:
            slot = (weakref.ref(w), {})
            self._entries[id(w)] = slot
            weakref.finalize(w, self._entries.pop, id(w), None)
        return slot[1]

    def get(self, w: WeightBank, ts: TransformSet, scaled: bool) -> np.ndarray:
        with self._lock:
            per_bank = self._bank_entries(w)
            entry = per_bank.get((id(ts), scaled))
            if entry is not None and entry[0] is ts:
                self.hits += 1
                return entry[1]
            self.misses += 1
            h = integer_matrices(ts)[0] if scaled else ts.H
            transformed = transform_array(kernel_operand(w.data, ts), h)
            transformed.setflags(write=False)
            per_bank[(id(ts), scaled)] = (ts, transformed)
        logger.debug("weights_transformed", c_out=w.c_out, c_in=w.c_in, transform_set=ts.name, scaled=scaled)
        return transformed

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self.hits = self.misses = 0


weight_cache = TransformedWeightCache()


# ============================================
# Planning
# ============================================

def plan_tiles(layer: LayerSpec, ts: TransformSet) -> TilePlan:
    """Tile the layer's output into O_r^3 blocks and locate their input windows."""
    geom = layer.geom
    if (ts.k, ts.s) != (geom.k, geom.s):
        raise ShapeError(
            f"transform set {ts.name} is built for k={ts.k}, s={ts.s}; layer {layer.name} has "
            f"k={geom.k}, s={geom.s}. Supply a transform set for this kernel and stride."
        )
    p_t = geom.k - geom.p - 1
    phase = p_t % geom.s
    if phase != ts.phase:
        usable = [p for p in range(geom.k) if (geom.k - p - 1) % geom.s == ts.phase]
        raise PhaseError(
            f"layer {layer.name}: padding p={geom.p} gives phase (k-p-1) mod s = {phase}, but transform set "
            f"{ts.name} is calibrated for phase {ts.phase}. Use p in {usable} or supply a matching transform set."
        )

    tiles = -(-geom.o // ts.o_r)
    plan = TilePlan(
        i=geom.i,
        o=geom.o,
        r=ts.r,
        i_r=ts.i_r,
        o_r=ts.o_r,
        input_offset=p_t // geom.s,
        tiles_per_axis=tiles,
        crop=tiles * ts.o_r - geom.o,
    )
    logger.debug("tile_plan_created", layer=layer.name, tiles_per_axis=tiles, crop=plan.crop)
    return plan


def count_multiplies(layer: LayerSpec, ts: TransformSet) -> MultiplyCount:
    """Element-wise multiplies the engine performs for `layer`."""
    plan = plan_tiles(layer, ts)
    per_pair = plan.tile_count * ts.e_r ** 3
    total = per_pair * layer.c_in * layer.c_out
    per_output = Fraction(per_pair, plan.uncropped ** 3)
    per_valid = Fraction(per_pair, plan.o ** 3)
    return MultiplyCount(
        total=total,
        per_output=per_output,
        per_valid_output=per_valid,
        boundary_overhead=per_valid / per_output - 1,
    )


def accumulator_bound(ts: TransformSet, c_in: int, quant: QuantSpec | None = None) -> int:
    """Worst-case magnitude of any integer-path intermediate for declared widths."""
    quant = quant or QuantSpec()
    h_scaled, pt, at = integer_matrices(ts)
    act = -quant.activation_range[0]
    wmax = -quant.weight_range[0]
    bound = act * pt.row_norm() ** 3 * wmax * h_scaled.row_norm() ** 3 * c_in * at.row_norm() ** 3
    return int(bound)


def _magnitude(a: np.ndarray) -> int:
    """Largest |element| as a Python int; the int64 minimum does not wrap."""
    if not a.size:
        return 0
    return max(abs(int(a.min())), abs(int(a.max())))


def _float_bound(x: np.ndarray, w: np.ndarray, ts: TransformSet, c_in: int) -> Fraction:
    xmax = _magnitude(x)
    wmax = _magnitude(w)
    norms = ts.Pt.row_norm() ** 3 * ts.H.row_norm() ** 3 * ts.At.row_norm() ** 3
    return xmax * wmax * c_in * norms * kernel_scale(ts) ** 3


# ============================================
# Layer execution
# ============================================

def _check_layer(x: ChannelVolume, w: WeightBank, layer: LayerSpec) -> ElementKind:
    kind = check_layer_operands(x, w, layer.geom)
    if (w.c_in, w.c_out) != (layer.c_in, layer.c_out):
        raise ShapeError(
            f"layer {layer.name} declares {layer.c_in}->{layer.c_out} channels, weights hold {w.c_in}->{w.c_out}"
        )
    return kind


def _gather_windows(x: np.ndarray, plan: TilePlan) -> np.ndarray:
    """(c, t, t, t, I_r, I_r, I_r) view of every tile's input window with zero halo."""
    lo = plan.input_offset
    needed = plan.r * (plan.tiles_per_axis - 1) + plan.i_r
    hi = max(0, needed - lo - plan.i)
    padded = np.pad(x, ((0, 0),) + ((lo, hi),) * 3)
    windows = sliding_window_view(padded, (plan.i_r,) * 3, axis=(1, 2, 3))
    n, step = plan.tiles_per_axis, plan.r
    return windows[:, :n * step:step, :n * step:step, :n * step:step]


def _resolve_workers(workers: int | None) -> int:
    workers = settings.threads if workers is None else workers
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


def _run_layer(
    kernels: np.ndarray,
    inputs: np.ndarray,
    at: Matrix2,
    plan: TilePlan,
    accumulate: AccumulationDomain,
    counter: MultiplyCounter | None,
    workers: int,
    dtype: np.dtype,
) -> np.ndarray:
    """Uncropped output (c_out, n*O_r, n*O_r, n*O_r) from transformed operands."""
    c_out, c_in = kernels.shape[:2]
    n, o_r = plan.tiles_per_axis, plan.o_r
    out = np.zeros((c_out, n * o_r, n * o_r, n * o_r), dtype=dtype)

    def run_item(item: tuple[int, int]) -> None:
        co, td = item
        acc = None
        for ci in range(c_in):
            product = kernels[co, ci] * inputs[ci, td]
            if counter is not None:
                counter.add(product.size)
            if accumulate is AccumulationDomain.SPATIAL:
                product = transform_array(product, at)
            acc = product if acc is None else acc + product
        block = transform_array(acc, at) if accumulate is AccumulationDomain.TRANSFORMED else acc
        # (th, tw, d, h, w) -> (d, th*O_r + h, tw*O_r + w)
        slab = block.transpose(2, 0, 3, 1, 4).reshape(o_r, n * o_r, n * o_r)
        out[co, td * o_r:(td + 1) * o_r] = slab

    items = [(co, td) for co in range(c_out) for td in range(n)]
    if workers == 1:
        for item in items:
            run_item(item)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_item, items))
    return out


def deconv3d_f3dc(
    x: ChannelVolume,
    w: WeightBank,
    layer: LayerSpec,
    ts: TransformSet,
    *,
    workers: int | None = None,
    accumulate: AccumulationDomain = AccumulationDomain.TRANSFORMED,
    counter: MultiplyCounter | None = None,
    cache: TransformedWeightCache | None = None,
) -> ChannelVolume:
    """
    3D transposed convolution of a whole layer via the fast tile transform.

    Integer layers are computed in float64, where every intermediate is an
    exact binary fraction, and returned as int64.
    """
    kind = _check_layer(x, w, layer)
    plan = plan_tiles(layer, ts)
    workers = _resolve_workers(workers)
    cache = cache or weight_cache

    if kind is ElementKind.INT64 and settings.strict_checks:
        bound = _float_bound(x.data, w.data, ts, layer.c_in)
        if bound >= FLOAT_MANTISSA_LIMIT:
            raise ExactnessError(
                f"layer {layer.name}: intermediate bound {bound} exceeds 2**53, float path cannot stay exact; "
                "use the quantized path"
            )

    kernels = cache.get(w, ts, scaled=False).astype(np.float64, copy=False)
    windows = _gather_windows(x.data.astype(np.float64), plan)
    inputs = transform_array(windows, ts.Pt)
    out = _run_layer(kernels, inputs, ts.At, plan, accumulate, counter, workers, np.dtype(np.float64))
    out = out[:, :plan.o, :plan.o, :plan.o]
    if kind is ElementKind.INT64:
        out = to_exact_integers(out)

    logger.info(
        "layer_deconvolved",
        layer=layer.name,
        c_in=layer.c_in,
        c_out=layer.c_out,
        i=layer.geom.i,
        o=plan.o,
        tiles_per_axis=plan.tiles_per_axis,
        accumulate=accumulate.value,
        workers=workers,
    )
    return ChannelVolume(out, kind)


def deconv3d_f3dc_quant(
    x: ChannelVolume,
    w: WeightBank,
    layer: LayerSpec,
    ts: TransformSet,
    *,
    quant: QuantSpec | None = None,
    workers: int | None = None,
    accumulate: AccumulationDomain = AccumulationDomain.TRANSFORMED,
    counter: MultiplyCounter | None = None,
    cache: TransformedWeightCache | None = None,
) -> ChannelVolume:
    """
    Integer-only layer: 16-bit activations, 8-bit weights, int64 accumulation.

    H is scaled to integers (by 2 per axis for the built-in set), so the
    pipeline produces total_scale times the true result; every value is
    checked for divisibility before the final exact division.
    """
    quant = quant or QuantSpec()
    kind = _check_layer(x, w, layer)
    if kind is not ElementKind.INT64:
        raise QuantizationError("the quantized path takes integer activations and weights")
    quant.check_activations(x.data)
    quant.check_weights(w.data)
    plan = plan_tiles(layer, ts)
    workers = _resolve_workers(workers)
    cache = cache or weight_cache

    scale = kernel_scale(ts)
    if scale != quant.kernel_scale:
        raise QuantizationError(f"transform set {ts.name} needs kernel scale {scale}, quant spec says {quant.kernel_scale}")
    bound = accumulator_bound(ts, layer.c_in, quant)
    if bound >= quant.accumulator_limit:
        raise QuantizationError(f"layer {layer.name}: accumulator bound {bound} overflows {quant.accumulator_bits} bits")

    _, pt, at = integer_matrices(ts)
    kernels = cache.get(w, ts, scaled=True)
    windows = _gather_windows(x.data, plan)
    inputs = transform_array(windows, pt)
    pre_shift = _run_layer(kernels, inputs, at, plan, accumulate, counter, workers, np.dtype(np.int64))

    total = quant.total_scale
    remainders = np.count_nonzero(pre_shift % total)
    if remainders:
        raise QuantizationError(f"layer {layer.name}: {remainders} pre-shift values are not divisible by {total}")
    out = (pre_shift // total)[:, :plan.o, :plan.o, :plan.o]

    logger.info(
        "quant_layer_deconvolved",
        layer=layer.name,
        c_in=layer.c_in,
        c_out=layer.c_out,
        i=layer.geom.i,
        o=plan.o,
        accumulator_bound=bound,
        workers=workers,
    )
    return ChannelVolume(out, ElementKind.INT64)
