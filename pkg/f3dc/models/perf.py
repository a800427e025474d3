"""
Performance model records
"""
from enum import Enum
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from f3dc.config import settings


class OpConvention(str, Enum):
    """How operations are counted when converting multiplies to GOPS."""
    VALID = "valid"  # 2 ops per valid MAC, k^3/s^3 per output
    ZIM = "zim"      # 2 ops per zero-inserted MAC, k^3 per output


class ComplexityRow(BaseModel):
    """Multiplies per output of the three methods for one (k, s, r)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    s: int
    r: int
    zim: Fraction
    winograd_based: Fraction  # (k/s)^3, inferred closed form
    f3dc: Fraction
    speedup_vs_zim: Fraction


class HardwareConfig(BaseModel):
    """Fast processing array parameters."""

    model_config = ConfigDict(frozen=True)

    fpu_count: int = Field(default=4, ge=1)
    multipliers_per_fpu: int = Field(default=512, ge=1)
    clock_hz: float = Field(default=150e6, gt=0)
    dsp_total: int = Field(default=2048, ge=1)
    fpa_rows: int = Field(default=2, ge=1)
    fpa_cols: int = Field(default=2, ge=1)

    @classmethod
    def from_settings(cls, **overrides) -> "HardwareConfig":
        values = {
            "fpu_count": settings.fpu_count,
            "multipliers_per_fpu": settings.multipliers_per_fpu,
            "clock_hz": settings.clock_hz,
            "dsp_total": settings.dsp_total,
            "fpa_rows": settings.fpa_rows,
            "fpa_cols": settings.fpa_cols,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    @model_validator(mode="after")
    def _check_array(self) -> "HardwareConfig":
        if self.fpa_rows * self.fpa_cols != self.fpu_count:
            raise ValueError(f"a {self.fpa_rows}x{self.fpa_cols} array needs {self.fpa_rows * self.fpa_cols} FPUs, got {self.fpu_count}")
        return self

    @property
    def multipliers(self) -> int:
        return self.fpu_count * self.multipliers_per_fpu


class ThroughputReport(BaseModel):
    """Peak rates of a hardware profile running one (k, s, r) transform."""

    model_config = ConfigDict(frozen=True)

    k: int
    s: int
    r: int
    dsp_total: int
    clock_hz: float
    peak_mult_rate: float
    equiv_valid_gops: float
    equiv_zim_gops: float

    def peak_gops(self, convention: OpConvention = OpConvention.VALID) -> float:
        return self.equiv_valid_gops if convention is OpConvention.VALID else self.equiv_zim_gops

    def utilization_for(self, target_gops: float, convention: OpConvention = OpConvention.VALID) -> float:
        return target_gops / self.peak_gops(convention)

    def density_for(self, gops: float) -> float:
        """GOPS per DSP."""
        return gops / self.dsp_total


class FpaEstimate(BaseModel):
    """Ideal schedule of one layer on the processing array."""

    model_config = ConfigDict(frozen=True)

    layer: str
    rounds: int
    cycles: int
    latency_s: float
    valid_gops: float
    zim_gops: float
    multiplier_utilization: float


class DesignDensity(BaseModel):
    """Reported performance density of one accelerator design."""

    model_config = ConfigDict(frozen=True)

    design: str
    gops: float
    dsp: int
    density: float
    f3dc_gain: float
