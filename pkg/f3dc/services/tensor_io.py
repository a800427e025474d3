"""
F3DT tensor file format

    offset 0   magic  b"F3DT"
    offset 4   u8     version (1)
    offset 5   u8     dtype code (0 = int64, 1 = float64)
    offset 6   u8     rank
    offset 7   u32le  extents[rank]
    then       raw little-endian elements in canonical row-major order
"""
import struct
from pathlib import Path

import numpy as np
import structlog

from f3dc.errors import TensorFormatError
from f3dc.models.tensor import ElementKind

logger = structlog.get_logger()

MAGIC = b"F3DT"
VERSION = 1
HEADER_SIZE = 7

DTYPE_CODES: dict[ElementKind, int] = {
    ElementKind.INT64: 0,
    ElementKind.FLOAT64: 1,
}
_WIRE_DTYPES: dict[int, np.dtype] = {
    0: np.dtype("<i8"),
    1: np.dtype("<f8"),
}


def encode_tensor(array: np.ndarray) -> bytes:
    """Serialize an int or float array of any rank."""
    kind = ElementKind.of(array.dtype)
    code = DTYPE_CODES[kind]
    if array.ndim > 255:
        raise ValueError(f"rank {array.ndim} does not fit the header")
    header = MAGIC + struct.pack("<BBB", VERSION, code, array.ndim)
    extents = struct.pack(f"<{array.ndim}I", *array.shape)
    payload = np.ascontiguousarray(array, dtype=_WIRE_DTYPES[code]).tobytes(order="C")
    return header + extents + payload


def decode_tensor(blob: bytes) -> np.ndarray:
    """Parse an F3DT blob; errors carry the offending byte offset."""
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise TensorFormatError(f"bad magic bytes {blob[:4]!r}, expected {MAGIC!r}", offset=0)
    if len(blob) < HEADER_SIZE:
        raise TensorFormatError("truncated header", offset=len(blob))
    version, code, rank = struct.unpack_from("<BBB", blob, 4)
    if version != VERSION:
        raise TensorFormatError(f"unsupported version {version}", offset=4)
    if code not in _WIRE_DTYPES:
        raise TensorFormatError(f"unknown dtype code {code}", offset=5)

    extents_end = HEADER_SIZE + 4 * rank
    if len(blob) < extents_end:
        raise TensorFormatError(f"truncated extents for rank {rank}", offset=len(blob))
    shape = struct.unpack_from(f"<{rank}I", blob, HEADER_SIZE)

    wire = _WIRE_DTYPES[code]
    expected = int(np.prod(shape, dtype=np.int64)) * wire.itemsize
    payload = blob[extents_end:]
    if len(payload) != expected:
        raise TensorFormatError(
            f"payload holds {len(payload)} bytes, shape {shape} needs {expected}",
            offset=extents_end,
        )
    array = np.frombuffer(payload, dtype=wire).reshape(shape)
    return array.astype(ElementKind.of(wire).dtype)


def write_tensor(path: str | Path, array: np.ndarray) -> None:
    blob = encode_tensor(array)
    Path(path).write_bytes(blob)
    logger.debug("tensor_written", path=str(path), shape=array.shape, bytes=len(blob))


def read_tensor(path: str | Path) -> np.ndarray:
    array = decode_tensor(Path(path).read_bytes())
    logger.debug("tensor_read", path=str(path), shape=array.shape)
    return array
