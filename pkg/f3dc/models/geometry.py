"""
Deconvolution geometry, zero-insertion plan, weight bank and layer shapes
"""
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from f3dc.errors import ShapeError
from f3dc.models.tensor import ElementKind, Tensor3, DenseArray


class DeconvGeometry(BaseModel):
    """
    Per-axis (cubic) transposed convolution geometry.

    The output size follows from the other four: o = (i - 1)s + k - 2p.
    """

    model_config = ConfigDict(frozen=True)

    i: int = Field(ge=1, description="input spatial size")
    k: int = Field(ge=1, description="kernel size")
    s: int = Field(ge=1, description="stride")
    p: int = Field(default=0, ge=0, description="padding")

    @model_validator(mode="after")
    def _check_geometry(self) -> "DeconvGeometry":
        if self.p >= self.k:
            raise ValueError(f"padding p={self.p} must be smaller than kernel size k={self.k}")
        if self.o < 1:
            raise ValueError(f"geometry (i={self.i}, k={self.k}, s={self.s}, p={self.p}) has empty output")
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def o(self) -> int:
        return (self.i - 1) * self.s + self.k - 2 * self.p


class ZimPlan(BaseModel):
    """Sizes of the zero-inserted stride-1 convolution equivalent to a deconvolution."""

    model_config = ConfigDict(frozen=True)

    i_t: int  # size after inner zero insertion
    p_t: int  # padding of the equivalent convolution
    k_t: int
    s_t: int
    o_t: int


class WeightBank(DenseArray):
    """Kernels indexed [c_out][c_in], each k x k x k; shape (c_out, c_in, k, k, k)."""

    _ndim = 5

    def __init__(self, data: ArrayLike, kind: ElementKind | None = None):
        super().__init__(data, kind)
        _, _, kd, kh, kw = self._data.shape
        if not kd == kh == kw or kd < 1:
            raise ShapeError(f"kernels must be non-empty cubes, got {(kd, kh, kw)}")

    @classmethod
    def from_kernels(cls, kernels: Sequence[Sequence[Tensor3]]) -> "WeightBank":
        kinds = [g.kind for row in kernels for g in row]
        if not kinds:
            raise ShapeError("WeightBank needs at least one kernel")
        stacked = np.stack([np.stack([g.data for g in row]) for row in kernels])
        return cls(stacked, ElementKind.promote(*kinds))

    @property
    def c_out(self) -> int:
        return int(self._data.shape[0])

    @property
    def c_in(self) -> int:
        return int(self._data.shape[1])

    @property
    def k(self) -> int:
        return int(self._data.shape[2])

    def kernel(self, co: int, ci: int) -> Tensor3:
        return Tensor3(self._data[co, ci], self._kind)


class LayerSpec(BaseModel):
    """Shape of one deconvolution layer."""

    model_config = ConfigDict(frozen=True)

    name: str = "layer"
    c_in: int = Field(ge=1)
    c_out: int = Field(ge=1)
    geom: DeconvGeometry

    @classmethod
    def build(cls, name: str, c_in: int, c_out: int, i: int, k: int, s: int, p: int) -> "LayerSpec":
        return cls(name=name, c_in=c_in, c_out=c_out, geom=DeconvGeometry(i=i, k=k, s=s, p=p))
