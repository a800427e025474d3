"""
Benchmark configuration and report rows
"""
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from f3dc.config import settings
from f3dc.models.geometry import LayerSpec


class ValueRanges(BaseModel):
    """Inclusive ranges of random activations and weights."""

    model_config = ConfigDict(frozen=True)

    activation_min: int = -(1 << 15)
    activation_max: int = (1 << 15) - 1
    weight_min: int = -128
    weight_max: int = 127

    @model_validator(mode="after")
    def _check_order(self) -> "ValueRanges":
        if self.activation_min > self.activation_max:
            raise ValueError(f"activation_min {self.activation_min} exceeds activation_max {self.activation_max}")
        if self.weight_min > self.weight_max:
            raise ValueError(f"weight_min {self.weight_min} exceeds weight_max {self.weight_max}")
        return self


class BenchConfig(BaseModel):
    """A layer suite plus run parameters."""

    model_config = ConfigDict(frozen=True)

    layers: list[LayerSpec] = Field(min_length=1)
    seed: int = Field(default_factory=lambda: settings.seed)
    repetitions: int = Field(default=3, ge=1)
    threads: int = Field(default_factory=lambda: settings.threads, ge=1)
    values: ValueRanges = ValueRanges()


# ============================================
# Report rows (one CSV line each)
# ============================================

class VerifyRow(BaseModel):
    """Oracle comparison of one layer; deviations are max |path - zim|."""

    model_config = ConfigDict(frozen=True)

    layer: str
    c_in: int
    c_out: int
    i: int
    k: int
    s: int
    p: int
    o: int
    iom_deviation: int
    f3dc_deviation: int
    quant_deviation: int
    passed: bool

    @property
    def max_deviation(self) -> int:
        return max(self.iom_deviation, self.f3dc_deviation, self.quant_deviation)


class PerfRow(BaseModel):
    """Throughput of one hardware profile at a target GOPS."""

    model_config = ConfigDict(frozen=True)

    profile: str
    dsp_total: int
    clock_hz: float
    peak_mult_rate: float
    equiv_valid_gops: float
    equiv_zim_gops: float
    target_gops: float
    utilization_valid: float
    utilization_zim: float
    density: float


class BenchRow(BaseModel):
    """Wall-clock comparison of the fast and zero-insertion paths on one layer."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    layer: str
    c_in: int
    c_out: int
    i: int
    o: int
    f3dc_seconds: float
    zim_seconds: float
    speedup: float
    f3dc_multiplies_per_output: Fraction
    zim_multiplies_per_output: int
    zero_fraction: float
