"""
Single-tile fast deconvolution transforms

A tile is computed as

    Y = At x3 [ (H x3 g) * (Pt x3 d) ]

where "M x3 t" is the mode product of M along all three axes of t and "*"
is the element-wise product (EWMM). The slice / multiply / rotate
choreography of the hardware is one realization of these mode products;
only the mode-product contract is relied on here.

Transform matrices hold 0, +-1 and powers of two only, so they are applied
with add/subtract and exponent shifts; generic multiplies are reserved for
the element-wise product.
"""
from fractions import Fraction
from functools import lru_cache
from math import lcm
from pathlib import Path

import numpy as np
import structlog
from pydantic import ValidationError

from f3dc.config import settings
from f3dc.errors import ExactnessError, F3DCError, QuantizationError, ShapeError, TransformSetError
from f3dc.models.tensor import ElementKind, Matrix2, Tensor3
from f3dc.models.transform import TileDomain, TransformedTile, TransformSet
from f3dc.services.tensor_ops import ewmul

logger = structlog.get_logger()

_HALF = Fraction(1, 2)

# T3(6^3, 4^3): r = 3, k = 4, s = 2
_T3_K4_S2_PT = [
    [1, 0, -1, 0, 0],
    [0, 1, 1, 0, 0],
    [0, -1, 1, 0, 0],
    [0, -1, 0, 1, 0],
    [0, 1, 0, -1, 0],
    [0, 0, 1, 1, 0],
    [0, 0, -1, 1, 0],
    [0, 0, -1, 0, 1],
]
_T3_K4_S2_H = [
    [0, 0, 0, 1],
    [0, _HALF, 0, _HALF],
    [0, -_HALF, 0, _HALF],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [_HALF, 0, _HALF, 0],
    [-_HALF, 0, _HALF, 0],
    [1, 0, 0, 0],
]
_T3_K4_S2_AT = [
    [1, 1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 0],
    [0, 1, -1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, -1, 0],
    [0, 1, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 1, 1],
]


@lru_cache
def builtin_t3_k4_s2() -> TransformSet:
    """The third-order set for 4^3 kernels at stride 2 (6^3 output blocks)."""
    return TransformSet(
        name="t3_k4_s2",
        r=3,
        k=4,
        s=2,
        H=Matrix2.from_rows(_T3_K4_S2_H),
        Pt=Matrix2.from_rows(_T3_K4_S2_PT),
        At=Matrix2.from_rows(_T3_K4_S2_AT),
        flip_kernel=False,
        phase=0,
    )


# ============================================
# Strength-reduced matrix application
# ============================================

def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _scaled_term(v: np.ndarray, c: Fraction) -> np.ndarray:
    if c == 1:
        return v
    if c == -1:
        return -v
    num, den = abs(c.numerator), c.denominator
    if _is_power_of_two(num) and _is_power_of_two(den):
        e = num.bit_length() - den.bit_length()
        if np.issubdtype(v.dtype, np.integer):
            term = np.left_shift(v, e)
        else:
            term = np.ldexp(v, e)
        return term if c > 0 else -term
    return v * (int(c) if c.denominator == 1 else float(c))


def apply_transform(array: np.ndarray, matrix: Matrix2, axis: int) -> np.ndarray:
    """
    Mode product of `matrix` along `axis` of a (batched) array.

    Rows are built by adding the non-zero terms in ascending source order,
    so the result equals tensor_ops.mode_product_array exactly.
    """
    if matrix.cols != array.shape[axis]:
        raise ShapeError(f"mode {axis}: matrix has {matrix.cols} columns, tensor extent is {array.shape[axis]}")
    dtype = np.result_type(array.dtype, matrix.data.dtype)
    src = np.moveaxis(array, axis, 0).astype(dtype, copy=False)
    rows = []
    for row in matrix.entries():
        acc = np.zeros(src.shape[1:], dtype=dtype)
        for x, c in enumerate(row):
            if c != 0:
                acc += _scaled_term(src[x], c)
        rows.append(acc)
    return np.moveaxis(np.stack(rows), 0, axis)


def transform_array(array: np.ndarray, matrix: Matrix2) -> np.ndarray:
    """Apply `matrix` along each of the last three axes."""
    for axis in (-3, -2, -1):
        array = apply_transform(array, matrix, array.ndim + axis)
    return array


def to_exact_integers(array: np.ndarray) -> np.ndarray:
    """Convert an integer-valued float array back to int64, refusing to round."""
    rounded = np.rint(array)
    if not np.array_equal(rounded, array):
        worst = float(np.max(np.abs(rounded - array)))
        raise ExactnessError(f"expected integral results, largest fractional residue {worst}")
    return rounded.astype(np.int64)


def _require_cube(t: Tensor3, n: int, what: str) -> None:
    if t.dims != (n, n, n):
        raise ShapeError(f"{what} must be {n}^3, got {t.dims}")


# ============================================
# Tile pipeline
# ============================================

def kernel_operand(g: np.ndarray, ts: TransformSet) -> np.ndarray:
    """Kernel cube(s) in the orientation the set expects (last three axes)."""
    return g[..., ::-1, ::-1, ::-1] if ts.flip_kernel else g


def transform_kernel(g: Tensor3, ts: TransformSet) -> TransformedTile:
    _require_cube(g, ts.k, "kernel")
    out = transform_array(kernel_operand(g.data, ts), ts.H)
    return TransformedTile(tensor=Tensor3(out), domain=TileDomain.KERNEL)


def transform_input(d: Tensor3, ts: TransformSet) -> TransformedTile:
    _require_cube(d, ts.i_r, "input tile")
    out = transform_array(d.data, ts.Pt)
    return TransformedTile(tensor=Tensor3(out), domain=TileDomain.INPUT)


def inverse_transform(e: TransformedTile | Tensor3, ts: TransformSet) -> Tensor3:
    t = e.tensor if isinstance(e, TransformedTile) else e
    _require_cube(t, ts.e_r, "product tile")
    return Tensor3(transform_array(t.data, ts.At))


def f3dc_tile(g: Tensor3, d: Tensor3, ts: TransformSet) -> Tensor3:
    """
    One O_r^3 output block from a k^3 kernel and an I_r^3 input window.

    Integer operands give an int64 block; the fractional kernel transform is
    carried in float64, where every intermediate is an exact binary fraction.
    """
    u = transform_kernel(g, ts).tensor
    v = transform_input(d, ts).tensor
    product = TransformedTile(tensor=ewmul(u, v), domain=TileDomain.PRODUCT)
    y = inverse_transform(product, ts)
    if g.kind is ElementKind.INT64 and d.kind is ElementKind.INT64:
        return Tensor3(to_exact_integers(y.data), ElementKind.INT64)
    return y


# ============================================
# Scaled-integer variant
# ============================================

def kernel_scale(ts: TransformSet) -> int:
    """Per-axis factor that makes H integral (lcm of its denominators)."""
    return lcm(*(x.denominator for row in ts.H.entries() for x in row))


def integer_matrices(ts: TransformSet) -> tuple[Matrix2, Matrix2, Matrix2]:
    """(scaled H, Pt, At) as int64 matrices."""
    if not (ts.Pt.is_integral() and ts.At.is_integral()):
        raise QuantizationError(f"transform set {ts.name}: Pt and At must be integral for the integer path")
    return ts.H.scaled(kernel_scale(ts)), ts.Pt, ts.At


def f3dc_tile_scaled(g: Tensor3, d: Tensor3, ts: TransformSet) -> Tensor3:
    """
    Pre-shift integer block: kernel_scale(ts)**3 times f3dc_tile(g, d, ts).

    Every stage runs in int64 with the kernel transform scaled to integers.
    """
    if g.kind is not ElementKind.INT64 or d.kind is not ElementKind.INT64:
        raise QuantizationError("scaled-integer tiles need int64 operands")
    _require_cube(g, ts.k, "kernel")
    _require_cube(d, ts.i_r, "input tile")
    h_scaled, pt, at = integer_matrices(ts)
    u = Tensor3(transform_array(kernel_operand(g.data, ts), h_scaled), ElementKind.INT64)
    v = Tensor3(transform_array(d.data, pt), ElementKind.INT64)
    return Tensor3(transform_array(ewmul(u, v).data, at), ElementKind.INT64)


# ============================================
# Text format
# ============================================

_HEADER_KEYS = ("name", "r", "k", "s", "flip_kernel", "phase")
_SECTIONS = ("H", "Pt", "At")


def _format_entry(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dump_transform_set(ts: TransformSet) -> str:
    lines = [
        "# F3DC transform set",
        f"name {ts.name}",
        f"r {ts.r}",
        f"k {ts.k}",
        f"s {ts.s}",
        f"flip_kernel {'true' if ts.flip_kernel else 'false'}",
        f"phase {ts.phase}",
    ]
    for section in _SECTIONS:
        lines += ["", f"[{section}]"]
        for row in getattr(ts, section).entries():
            lines.append(" ".join(_format_entry(x) for x in row))
    return "\n".join(lines) + "\n"


def _parse_bool(value: str, line: int) -> bool:
    lowered = value.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise TransformSetError(f"expected a boolean, got {value!r}", line)


def parse_transform_set(text: str) -> TransformSet:
    """Parse the text format; entries are exact rationals such as -1/2."""
    header: dict[str, str] = {}
    header_lines: dict[str, int] = {}
    rows: dict[str, list[list[Fraction]]] = {}
    section_lines: dict[str, int] = {}
    section: str | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise TransformSetError(f"unknown section [{section}]", lineno)
            if section in rows:
                raise TransformSetError(f"duplicate section [{section}]", lineno)
            rows[section] = []
            section_lines[section] = lineno
            continue
        if section is None:
            key, _, value = line.partition(" ")
            if key not in _HEADER_KEYS:
                raise TransformSetError(f"unknown key {key!r}", lineno)
            header[key] = value.strip()
            header_lines[key] = lineno
            continue
        try:
            rows[section].append([Fraction(tok) for tok in line.split()])
        except (ValueError, ZeroDivisionError):
            raise TransformSetError(f"bad matrix entry in {line!r}", lineno)

    for key in ("r", "k", "s"):
        if key not in header:
            raise TransformSetError(f"missing key {key!r}")
    for name in _SECTIONS:
        if name not in rows:
            raise TransformSetError(f"missing section [{name}]")

    try:
        values = {key: int(header[key]) for key in ("r", "k", "s")}
        phase = int(header.get("phase", "0"))
    except ValueError as e:
        raise TransformSetError(f"integer header value expected: {e}")
    flip = _parse_bool(header["flip_kernel"], header_lines["flip_kernel"]) if "flip_kernel" in header else False

    matrices = {}
    for name in _SECTIONS:
        try:
            matrices[name] = Matrix2.from_rows(rows[name])
        except F3DCError as e:
            raise TransformSetError(f"[{name}]: {e}", section_lines[name])

    try:
        return TransformSet(
            name=header.get("name", "custom"),
            flip_kernel=flip,
            phase=phase,
            **values,
            **matrices,
        )
    except ValidationError as e:
        raise TransformSetError(f"inconsistent transform set: {e.errors()[0]['msg']}")


def load_transform_set(path: str | Path) -> TransformSet:
    ts = parse_transform_set(Path(path).read_text(encoding="utf-8"))
    logger.info("transform_set_loaded", path=str(path), name=ts.name, r=ts.r, k=ts.k, s=ts.s)
    return ts


def save_transform_set(ts: TransformSet, path: str | Path) -> None:
    Path(path).write_text(dump_transform_set(ts), encoding="utf-8")


def resolve_transform_set(path: str | Path | None = None) -> TransformSet:
    """Explicit path, then F3DC_TRANSFORM_SET_PATH, then the built-in set."""
    path = path or settings.transform_set_path
    if path:
        return load_transform_set(path)
    return builtin_t3_k4_s2()
