"""
Engine models: tile plans, quantization widths and multiply counts
"""
from enum import Enum
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from f3dc.errors import QuantizationError


class AccumulationDomain(str, Enum):
    """Where per-channel tile products are summed across input channels."""
    TRANSFORMED = "transformed"  # E_r^3, one inverse transform per (tile, c_out)
    SPATIAL = "spatial"          # O_r^3, one inverse transform per (tile, c_out, c_in)


class TilePlan(BaseModel):
    """
    Mapping between output blocks and input windows, identical on every axis.

    Tile t reads input samples [r*t - input_offset, r*t - input_offset + i_r)
    (out-of-range samples read as zero) and writes uncropped output
    [o_r*t, o_r*t + o_r). The last `crop` outputs of the uncropped grid
    are discarded.
    """

    model_config = ConfigDict(frozen=True)

    i: int
    o: int
    r: int
    i_r: int
    o_r: int
    input_offset: int
    tiles_per_axis: int
    crop: int

    def input_start(self, t: int) -> int:
        return self.r * t - self.input_offset

    def output_start(self, t: int) -> int:
        return self.o_r * t

    def input_windows(self) -> list[tuple[int, int]]:
        """Inclusive (first, last) input index of every tile on one axis."""
        return [(self.input_start(t), self.input_start(t) + self.i_r - 1) for t in range(self.tiles_per_axis)]

    @property
    def uncropped(self) -> int:
        return self.tiles_per_axis * self.o_r

    @property
    def tile_count(self) -> int:
        return self.tiles_per_axis ** 3


class QuantSpec(BaseModel):
    """Integer widths of the quantized path."""

    model_config = ConfigDict(frozen=True)

    activation_bits: int = Field(default=16, ge=2, le=32)
    weight_bits: int = Field(default=8, ge=2, le=32)
    kernel_scale: int = Field(default=2, ge=1)  # per axis; total scale is kernel_scale**3
    accumulator_bits: int = Field(default=64, ge=64, le=64)

    @property
    def total_scale(self) -> int:
        return self.kernel_scale ** 3

    @property
    def activation_range(self) -> tuple[int, int]:
        half = 1 << (self.activation_bits - 1)
        return -half, half - 1

    @property
    def weight_range(self) -> tuple[int, int]:
        half = 1 << (self.weight_bits - 1)
        return -half, half - 1

    @property
    def accumulator_limit(self) -> int:
        return 1 << (self.accumulator_bits - 1)

    def check_activations(self, values: np.ndarray) -> None:
        self._check_range("activations", values, self.activation_range, self.activation_bits)

    def check_weights(self, values: np.ndarray) -> None:
        self._check_range("weights", values, self.weight_range, self.weight_bits)

    @staticmethod
    def _check_range(what: str, values: np.ndarray, bounds: tuple[int, int], bits: int) -> None:
        if values.size == 0:
            return
        lo, hi = int(values.min()), int(values.max())
        if lo < bounds[0] or hi > bounds[1]:
            raise QuantizationError(f"{what} span [{lo}, {hi}], outside the signed {bits}-bit range {bounds}")


class MultiplyCount(BaseModel):
    """Element-wise multiplies of one layer."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    total: int
    per_output: Fraction          # per uncropped output per channel pair
    per_valid_output: Fraction    # per cropped (valid) output per channel pair
    boundary_overhead: Fraction   # per_valid_output / per_output - 1
