"""
Dense tensor containers: Tensor3, ChannelVolume and Matrix2

All containers hold a C-ordered numpy array with the write flag cleared,
so a constructed tensor can be shared between threads without copying.
Layout is row-major: (d, h, w) with w fastest, channels before volume axes.
"""
from enum import Enum
from fractions import Fraction
from typing import Any, ClassVar, Sequence

import numpy as np
from numpy.typing import ArrayLike

from f3dc.config import settings
from f3dc.errors import ExactnessError, ShapeError


class ElementKind(str, Enum):
    """Element type of a tensor, fixed at construction."""
    INT64 = "int64"
    FLOAT64 = "float64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.value)

    @classmethod
    def of(cls, dtype: np.dtype) -> "ElementKind":
        """Map a numpy dtype onto the element kind that can hold it."""
        if np.issubdtype(dtype, np.integer) or np.issubdtype(dtype, np.bool_):
            return cls.INT64
        if np.issubdtype(dtype, np.floating):
            return cls.FLOAT64
        raise TypeError(f"Unsupported element dtype: {dtype}")

    @classmethod
    def promote(cls, *kinds: "ElementKind") -> "ElementKind":
        return cls.FLOAT64 if cls.FLOAT64 in kinds else cls.INT64


def freeze_array(data: ArrayLike, kind: ElementKind | None, ndim: int, name: str) -> tuple[np.ndarray, ElementKind]:
    """Copy `data` into a read-only C-ordered array of the requested kind."""
    arr = np.asarray(data)
    if kind is None:
        kind = ElementKind.of(arr.dtype)
    if arr.ndim != ndim:
        raise ShapeError(f"{name} needs {ndim} axes, got shape {arr.shape}")
    if kind is ElementKind.INT64 and np.issubdtype(arr.dtype, np.floating):
        if not np.array_equal(arr, np.rint(arr)):
            raise ExactnessError(f"{name}: non-integral values cannot be stored as int64")
    frozen = np.array(arr, dtype=kind.dtype, copy=True, order="C")
    frozen.setflags(write=False)
    return frozen, kind


class DenseArray:
    """Shared behaviour of the immutable array containers."""

    __slots__ = ("_data", "_kind", "__weakref__")
    _ndim: ClassVar[int]

    def __init__(self, data: ArrayLike, kind: ElementKind | None = None):
        self._data, self._kind = freeze_array(data, kind, self._ndim, type(self).__name__)

    @property
    def data(self) -> np.ndarray:
        """Read-only view of the elements."""
        return self._data

    @property
    def kind(self) -> ElementKind:
        return self._kind

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(n) for n in self._data.shape)

    def flat(self) -> np.ndarray:
        """Elements in canonical row-major order."""
        return self._data.reshape(-1)

    def astype(self, kind: ElementKind):
        return type(self)(self._data, kind)

    def __getitem__(self, index: tuple[int, ...]) -> Any:
        if settings.strict_checks:
            if len(index) != self._ndim:
                raise IndexError(f"{type(self).__name__} takes {self._ndim} indices, got {len(index)}")
            for axis, (i, n) in enumerate(zip(index, self._data.shape)):
                if not 0 <= i < n:
                    raise IndexError(f"index {i} out of range [0, {n}) on axis {axis}")
        return self._data[index].item()

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (
            self._kind is other._kind
            and self._data.shape == other._data.shape
            and bool(np.array_equal(self._data, other._data))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.shape} {self._kind.value}>"


class Tensor3(DenseArray):
    """Dense 3D value grid with immutable (d, h, w) extents."""

    _ndim = 3

    @classmethod
    def zeros(cls, dims: Sequence[int], kind: ElementKind = ElementKind.INT64) -> "Tensor3":
        return cls(np.zeros(tuple(dims), dtype=kind.dtype), kind)

    @classmethod
    def ones(cls, dims: Sequence[int], kind: ElementKind = ElementKind.INT64) -> "Tensor3":
        return cls(np.ones(tuple(dims), dtype=kind.dtype), kind)

    @classmethod
    def from_flat(cls, dims: Sequence[int], values: ArrayLike, kind: ElementKind | None = None) -> "Tensor3":
        flat = np.asarray(values).reshape(-1)
        expected = int(np.prod(dims))
        if flat.size != expected:
            raise ShapeError(f"{flat.size} values cannot fill dims {tuple(dims)} ({expected} elements)")
        return cls(flat.reshape(tuple(dims)), kind)

    @classmethod
    def ramp(cls, dims: Sequence[int], kind: ElementKind = ElementKind.INT64) -> "Tensor3":
        """0, 1, 2, ... in canonical order."""
        return cls.from_flat(dims, np.arange(int(np.prod(dims))), kind)

    @property
    def dims(self) -> tuple[int, int, int]:
        d, h, w = self._data.shape
        return int(d), int(h), int(w)


class ChannelVolume(DenseArray):
    """Channel-major stack of equally sized Tensor3 volumes, shape (c, d, h, w)."""

    _ndim = 4

    @classmethod
    def from_channels(cls, channels: Sequence[Tensor3]) -> "ChannelVolume":
        if not channels:
            raise ShapeError("ChannelVolume needs at least one channel")
        dims = {t.dims for t in channels}
        if len(dims) != 1:
            raise ShapeError(f"channels have differing dims: {sorted(dims)}")
        kind = ElementKind.promote(*(t.kind for t in channels))
        return cls(np.stack([t.data for t in channels]), kind)

    @classmethod
    def zeros(cls, channels: int, dims: Sequence[int], kind: ElementKind = ElementKind.INT64) -> "ChannelVolume":
        return cls(np.zeros((channels, *dims), dtype=kind.dtype), kind)

    @property
    def channels(self) -> int:
        return int(self._data.shape[0])

    @property
    def dims(self) -> tuple[int, int, int]:
        _, d, h, w = self._data.shape
        return int(d), int(h), int(w)

    def channel(self, index: int) -> Tensor3:
        return Tensor3(self._data[index], self._kind)


class Matrix2(DenseArray):
    """Row-major matrix; holds the H, Pt and At transforms."""

    _ndim = 2

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int | float | Fraction]]) -> "Matrix2":
        """
        Build from exact entries.

        Integral entries give an int64 matrix; otherwise every entry must be
        exactly representable as a binary float (dyadic rational).
        """
        entries = [[Fraction(x) for x in row] for row in rows]
        if len({len(row) for row in entries}) > 1:
            raise ShapeError("matrix rows have differing lengths")
        if all(x.denominator == 1 for row in entries for x in row):
            return cls(np.array([[int(x) for x in row] for row in entries], dtype=np.int64).reshape(len(entries), -1))
        values = []
        for row in entries:
            for x in row:
                if Fraction(float(x)) != x:
                    raise ExactnessError(f"matrix entry {x} is not exactly representable")
            values.append([float(x) for x in row])
        return cls(np.array(values, dtype=np.float64))

    @classmethod
    def identity(cls, n: int) -> "Matrix2":
        return cls(np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return int(self._data.shape[0])

    @property
    def cols(self) -> int:
        return int(self._data.shape[1])

    def entries(self) -> list[list[Fraction]]:
        """Exact entries (binary floats convert to Fraction without rounding)."""
        return [[Fraction(x.item()) for x in row] for row in self._data]

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries() for x in row)

    def row_norm(self) -> Fraction:
        """Largest absolute row sum (the infinity norm)."""
        return max((sum((abs(x) for x in row), Fraction(0)) for row in self.entries()), default=Fraction(0))

    def scaled(self, factor: int | Fraction) -> "Matrix2":
        return Matrix2.from_rows([[x * factor for x in row] for row in self.entries()])

    def transpose(self) -> "Matrix2":
        return Matrix2(self._data.T, self._kind)
