"""
Tests for the F3DT tensor file format
"""
import struct

import numpy as np
import pytest

from f3dc.errors import TensorFormatError
from f3dc.services.tensor_io import MAGIC, decode_tensor, encode_tensor, read_tensor, write_tensor


def test_header_layout():
    blob = encode_tensor(np.arange(6, dtype=np.int64).reshape(2, 3))
    assert blob[:4] == MAGIC
    assert blob[4:7] == bytes([1, 0, 2])
    assert struct.unpack_from("<2I", blob, 7) == (2, 3)
    assert len(blob) == 7 + 8 + 6 * 8


def test_file_round_trip_keeps_kind(tmp_path, rng):
    ints = rng.integers(-(1 << 40), 1 << 40, size=(2, 3, 3, 3))
    floats = rng.standard_normal((4, 2, 2, 2, 2))
    for n, array in enumerate((ints, floats)):
        path = tmp_path / f"t{n}.f3dt"
        write_tensor(path, array)
        back = read_tensor(path)
        assert back.dtype == array.dtype
        assert np.array_equal(back, array)


def test_bad_magic_reports_offset_zero():
    blob = b"XXXX" + encode_tensor(np.zeros((1,), dtype=np.int64))[4:]
    with pytest.raises(TensorFormatError, match="offset 0") as excinfo:
        decode_tensor(blob)
    assert excinfo.value.offset == 0


def test_bad_version_and_dtype():
    blob = bytearray(encode_tensor(np.zeros((2,), dtype=np.int64)))
    blob[4] = 9
    with pytest.raises(TensorFormatError) as excinfo:
        decode_tensor(bytes(blob))
    assert excinfo.value.offset == 4
    blob[4], blob[5] = 1, 7
    with pytest.raises(TensorFormatError) as excinfo:
        decode_tensor(bytes(blob))
    assert excinfo.value.offset == 5


def test_truncated_payload():
    blob = encode_tensor(np.zeros((2, 2), dtype=np.float64))
    with pytest.raises(TensorFormatError) as excinfo:
        decode_tensor(blob[:-3])
    assert excinfo.value.offset == 7 + 8


def test_truncated_extents():
    blob = encode_tensor(np.zeros((2, 2, 2), dtype=np.int64))
    with pytest.raises(TensorFormatError, match="extents"):
        decode_tensor(blob[:10])
