"""
Verification and benchmark suites over configured layer lists
"""
import statistics
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Callable

import numpy as np
import structlog
from pydantic import ValidationError

from f3dc.config import settings
from f3dc.errors import ConfigError, F3DCError
from f3dc.models.bench import BenchConfig, BenchRow, ValueRanges, VerifyRow
from f3dc.models.geometry import LayerSpec, WeightBank
from f3dc.models.tensor import ChannelVolume, ElementKind
from f3dc.models.transform import TransformSet
from f3dc.services.engine_service import count_multiplies, deconv3d_f3dc, deconv3d_f3dc_quant, plan_tiles
from f3dc.services.oracle_service import deconv3d_iom, deconv3d_zim, zero_fraction

logger = structlog.get_logger()

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
DEFAULT_VERIFY_CONFIG = DATA_DIR / "verify_default.toml"
DEFAULT_BENCH_CONFIG = DATA_DIR / "bench_default.toml"

_LAYER_KEYS = ("name", "c_in", "c_out", "i", "k", "s", "p")


# ============================================
# Config loading
# ============================================

def parse_bench_config(document: dict, ts: TransformSet, source: str = "<config>") -> BenchConfig:
    """Validate a decoded TOML document; every layer must tile with `ts`."""
    raw_layers = document.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ConfigError(f"{source}: at least one [[layers]] entry is required")

    layers = []
    for n, entry in enumerate(raw_layers):
        name = entry.get("name", f"layer{n}")
        unknown = set(entry) - set(_LAYER_KEYS)
        if unknown:
            raise ConfigError(f"{source}: layer {name}: unknown keys {sorted(unknown)}")
        try:
            layer = LayerSpec.build(
                name=name,
                c_in=entry["c_in"],
                c_out=entry["c_out"],
                i=entry["i"],
                k=entry["k"],
                s=entry["s"],
                p=entry["p"],
            )
            plan_tiles(layer, ts)
        except KeyError as e:
            raise ConfigError(f"{source}: layer {name}: missing key {e.args[0]}")
        except ValidationError as e:
            raise ConfigError(f"{source}: layer {name}: {e.errors()[0]['msg']}")
        except F3DCError as e:
            raise ConfigError(f"{source}: layer {name}: {e}")
        layers.append(layer)

    try:
        return BenchConfig(
            layers=layers,
            seed=document.get("seed", settings.seed),
            repetitions=document.get("repetitions", 3),
            threads=document.get("threads", settings.threads),
            values=ValueRanges(**document.get("values", {})),
        )
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"])
        raise ConfigError(f"{source}: {location}: {error['msg']}")


def load_bench_config(path: str | Path, ts: TransformSet) -> BenchConfig:
    try:
        with open(path, "rb") as f:
            document = tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}")
    config = parse_bench_config(document, ts, source=str(path))
    logger.info("config_loaded", path=str(path), layers=len(config.layers), seed=config.seed)
    return config


def apply_overrides(config: BenchConfig, **overrides: int | None) -> BenchConfig:
    """Command-line overrides on a loaded config; `None` keeps the config value."""
    update = {key: value for key, value in overrides.items() if value is not None}
    if not update:
        return config
    try:
        return BenchConfig.model_validate({**dict(config), **update})
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"])
        raise ConfigError(f"{location}: {error['msg']}")


# ============================================
# Data
# ============================================

def random_layer_data(
    layer: LayerSpec, values: ValueRanges, seed: int, index: int
) -> tuple[ChannelVolume, WeightBank]:
    """Seeded input volume and weight bank for the `index`-th layer of a suite."""
    rng = np.random.default_rng([seed, index])
    i, k = layer.geom.i, layer.geom.k
    x = rng.integers(values.activation_min, values.activation_max, size=(layer.c_in, i, i, i), dtype=np.int64, endpoint=True)
    w = rng.integers(values.weight_min, values.weight_max, size=(layer.c_out, layer.c_in, k, k, k), dtype=np.int64, endpoint=True)
    return ChannelVolume(x, ElementKind.INT64), WeightBank(w, ElementKind.INT64)


def max_deviation(a: ChannelVolume, b: ChannelVolume) -> int:
    if a.shape != b.shape:
        raise F3DCError(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.data.size == 0:
        return 0
    return int(np.max(np.abs(a.data - b.data)))


# ============================================
# Suites
# ============================================

def verify_layer(
    layer: LayerSpec, x: ChannelVolume, w: WeightBank, ts: TransformSet, workers: int = 1
) -> VerifyRow:
    """Run every path on one layer and compare against zero insertion."""
    g = layer.geom
    expected = deconv3d_zim(x, w, g)
    deviations = {
        "iom": max_deviation(deconv3d_iom(x, w, g), expected),
        "f3dc": max_deviation(deconv3d_f3dc(x, w, layer, ts, workers=workers), expected),
        "quant": max_deviation(deconv3d_f3dc_quant(x, w, layer, ts, workers=workers), expected),
    }
    row = VerifyRow(
        layer=layer.name,
        c_in=layer.c_in,
        c_out=layer.c_out,
        i=g.i,
        k=g.k,
        s=g.s,
        p=g.p,
        o=g.o,
        iom_deviation=deviations["iom"],
        f3dc_deviation=deviations["f3dc"],
        quant_deviation=deviations["quant"],
        passed=not any(deviations.values()),
    )
    logger.info("verify_layer_checked", layer=layer.name, passed=row.passed, max_deviation=row.max_deviation)
    return row


def run_verify(config: BenchConfig, ts: TransformSet, workers: int | None = None) -> list[VerifyRow]:
    workers = config.threads if workers is None else workers
    rows = []
    for index, layer in enumerate(config.layers):
        x, w = random_layer_data(layer, config.values, config.seed, index)
        rows.append(verify_layer(layer, x, w, ts, workers))
    return rows


def median_seconds(fn: Callable[[], object], repetitions: int) -> float:
    """Median wall-clock of `repetitions` calls after one warm-up call."""
    fn()
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_layer(
    layer: LayerSpec, x: ChannelVolume, w: WeightBank, ts: TransformSet, repetitions: int, workers: int = 1
) -> BenchRow:
    g = layer.geom
    f3dc_seconds = median_seconds(lambda: deconv3d_f3dc(x, w, layer, ts, workers=workers), repetitions)
    zim_seconds = median_seconds(lambda: deconv3d_zim(x, w, g), repetitions)
    row = BenchRow(
        layer=layer.name,
        c_in=layer.c_in,
        c_out=layer.c_out,
        i=g.i,
        o=g.o,
        f3dc_seconds=f3dc_seconds,
        zim_seconds=zim_seconds,
        speedup=zim_seconds / f3dc_seconds if f3dc_seconds > 0 else float("inf"),
        f3dc_multiplies_per_output=count_multiplies(layer, ts).per_output,
        zim_multiplies_per_output=g.k ** 3,
        zero_fraction=zero_fraction(g),
    )
    logger.info("bench_layer_timed", layer=layer.name, f3dc_seconds=f3dc_seconds, zim_seconds=zim_seconds, speedup=row.speedup)
    return row


def run_bench(config: BenchConfig, ts: TransformSet, workers: int | None = None) -> list[BenchRow]:
    workers = config.threads if workers is None else workers
    rows = []
    for index, layer in enumerate(config.layers):
        x, w = random_layer_data(layer, config.values, config.seed, index)
        rows.append(bench_layer(layer, x, w, ts, config.repetitions, workers))
    return rows
