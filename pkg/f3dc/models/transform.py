"""
Transform sets and transformed tiles
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from f3dc.models.tensor import Matrix2, Tensor3


class TileDomain(str, Enum):
    """Which operand of the element-wise product a transformed tile is."""
    KERNEL = "kernel"
    INPUT = "input"
    PRODUCT = "product"


class TransformSet(BaseModel):
    """
    One r-order fast deconvolution instance for kernel size k and stride s.

    H (E_r x k) transforms kernels, Pt (E_r x I_r) input tiles and
    At (O_r x E_r) maps the element-wise product back to an O_r^3 output
    block. The tile computes Y[m] = sum of g[q] * d[j] over s*j + q = m + k - 1
    on every axis. `phase` is the value of (k - p - 1) mod s the set was
    calibrated for; `flip_kernel` flips g on all axes before transforming.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = "custom"
    r: int = Field(ge=1)
    k: int = Field(ge=1)
    s: int = Field(ge=1)
    H: Matrix2
    Pt: Matrix2
    At: Matrix2
    flip_kernel: bool = False
    phase: int = Field(default=0, ge=0)

    @property
    def i_r(self) -> int:
        return -(-(self.k + self.r * self.s - 1) // self.s)

    @property
    def e_r(self) -> int:
        return self.k + (self.r - 1) * self.s

    @property
    def o_r(self) -> int:
        return self.s * self.r

    @model_validator(mode="after")
    def _check_shapes(self) -> "TransformSet":
        expected = {
            "H": (self.e_r, self.k),
            "Pt": (self.e_r, self.i_r),
            "At": (self.o_r, self.e_r),
        }
        for label, shape in expected.items():
            actual = getattr(self, label).shape
            if actual != shape:
                raise ValueError(f"{label} must be {shape[0]}x{shape[1]} for r={self.r}, k={self.k}, s={self.s}, got {actual[0]}x{actual[1]}")
        if self.phase >= self.s:
            raise ValueError(f"phase {self.phase} must be smaller than the stride {self.s}")
        return self


class TransformedTile(BaseModel):
    """An E_r^3 cube in the transformed domain."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tensor: Tensor3
    domain: TileDomain

    @model_validator(mode="after")
    def _check_cubic(self) -> "TransformedTile":
        d, h, w = self.tensor.dims
        if not d == h == w:
            raise ValueError(f"transformed tiles are cubic, got {self.tensor.dims}")
        return self

    @property
    def e_r(self) -> int:
        return self.tensor.dims[0]
