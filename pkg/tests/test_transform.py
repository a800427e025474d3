"""
Tests for the single-tile transforms and transform set files
"""
from fractions import Fraction

import numpy as np
import pytest

from f3dc.config import settings
from f3dc.errors import ShapeError, TransformSetError
from f3dc.models.tensor import ElementKind, Matrix2, Tensor3
from f3dc.models.transform import TileDomain, TransformSet
from f3dc.services.bench_service import DATA_DIR
from f3dc.services import transform_service
from f3dc.services.tensor_ops import ewmul, mode_product_array
from f3dc.services.transform_service import (
    apply_transform,
    builtin_t3_k4_s2,
    dump_transform_set,
    f3dc_tile,
    f3dc_tile_scaled,
    inverse_transform,
    kernel_scale,
    load_transform_set,
    parse_transform_set,
    resolve_transform_set,
    save_transform_set,
    transform_input,
    transform_kernel,
)
from tests.helpers import naive_transform


def direct_tile(g: np.ndarray, d: np.ndarray, k: int, s: int, o_r: int) -> np.ndarray:
    """Y[m] = sum of g[q] * d[j] over s*j + q = m + k - 1 on every axis."""
    y = np.zeros((o_r,) * 3, dtype=np.int64)
    i_r = d.shape[0]
    for m in np.ndindex(*(o_r,) * 3):
        total = 0
        for j in np.ndindex(*(i_r,) * 3):
            q = tuple(mm + k - 1 - s * jj for mm, jj in zip(m, j))
            if all(0 <= qq < k for qq in q):
                total += int(g[q]) * int(d[j])
        y[m] = total
    return y


class TestBuiltinSet:
    def test_dimensions(self, ts):
        assert (ts.r, ts.k, ts.s) == (3, 4, 2)
        assert (ts.e_r, ts.i_r, ts.o_r) == (8, 5, 6)
        assert ts.H.shape == (8, 4)
        assert ts.Pt.shape == (8, 5)
        assert ts.At.shape == (6, 8)
        assert ts.flip_kernel is False
        assert ts.phase == 0

    def test_matrix_values(self, ts):
        assert ts.H.entries()[1] == [0, Fraction(1, 2), 0, Fraction(1, 2)]
        assert ts.Pt.is_integral() and ts.At.is_integral()
        assert [sum(row) for row in ts.At.entries()] == [3, 3, 0, 0, 3, 3]
        assert kernel_scale(ts) == 2

    def test_shipped_file_matches_builtin(self, ts):
        assert load_transform_set(DATA_DIR / "t3_k4_s2.tset") == ts

    def test_shape_validation(self, ts):
        with pytest.raises(ValueError, match="H must be 8x4"):
            TransformSet(r=3, k=4, s=2, H=ts.Pt, Pt=ts.Pt, At=ts.At)


class TestMicroOracles:
    """Each transform against the naive quadruple loop on 1000 random integer tiles."""

    def test_transform_kernel(self, ts, rng):
        for _ in range(1000):
            g = Tensor3(rng.integers(-128, 127, size=(4, 4, 4), endpoint=True))
            u = transform_kernel(g, ts)
            assert u.domain is TileDomain.KERNEL
            assert np.array_equal(u.tensor.data, naive_transform(g.data, ts.H.data))

    def test_transform_input(self, ts, rng):
        for _ in range(1000):
            d = Tensor3(rng.integers(-(1 << 15), (1 << 15) - 1, size=(5, 5, 5), endpoint=True))
            v = transform_input(d, ts)
            assert v.domain is TileDomain.INPUT
            assert np.array_equal(v.tensor.data, naive_transform(d.data, ts.Pt.data))

    def test_inverse_transform(self, ts, rng):
        for _ in range(1000):
            e = Tensor3(rng.integers(-(1 << 20), 1 << 20, size=(8, 8, 8)))
            assert np.array_equal(inverse_transform(e, ts).data, naive_transform(e.data, ts.At.data))


class TestTile:
    def test_matches_direct_definition(self, ts, rng):
        for _ in range(20):
            g = rng.integers(-128, 127, size=(4, 4, 4), endpoint=True)
            d = rng.integers(-(1 << 15), (1 << 15) - 1, size=(5, 5, 5), endpoint=True)
            y = f3dc_tile(Tensor3(g), Tensor3(d), ts)
            assert y.kind is ElementKind.INT64
            assert np.array_equal(y.data, direct_tile(g, d, 4, 2, 6))

    def test_single_nonzero_input(self, ts):
        d = np.zeros((5, 5, 5), dtype=np.int64)
        d[2, 2, 2] = 1
        g = Tensor3.ramp((4, 4, 4))
        y = f3dc_tile(g, Tensor3(d), ts)
        assert np.array_equal(y.data, direct_tile(g.data, d, 4, 2, 6))
        # output m reads g[m + 3 - 4] on each axis
        assert y[1, 1, 1] == g[0, 0, 0]
        assert y[4, 4, 4] == g[3, 3, 3]

    def test_float_operands_stay_float(self, ts, rng):
        g = Tensor3(rng.standard_normal((4, 4, 4)))
        d = Tensor3(rng.standard_normal((5, 5, 5)))
        y = f3dc_tile(g, d, ts)
        assert y.kind is ElementKind.FLOAT64
        assert np.allclose(y.data, direct_tile_float(g.data, d.data))

    def test_element_wise_product_goes_through_ewmul(self, ts, rng, monkeypatch):
        calls = []

        def recording_ewmul(a, b):
            calls.append((a.dims, b.dims))
            return ewmul(a, b)

        monkeypatch.setattr(transform_service, "ewmul", recording_ewmul)
        g = Tensor3(rng.integers(-128, 127, size=(4, 4, 4), endpoint=True))
        d = Tensor3(rng.integers(-100, 100, size=(5, 5, 5), endpoint=True))
        f3dc_tile(g, d, ts)
        f3dc_tile_scaled(g, d, ts)
        assert calls == [((8, 8, 8), (8, 8, 8))] * 2

    def test_wrong_tile_shape(self, ts):
        with pytest.raises(ShapeError):
            transform_input(Tensor3.zeros((4, 4, 4)), ts)
        with pytest.raises(ShapeError):
            transform_kernel(Tensor3.zeros((3, 3, 3)), ts)

    def test_flipped_set_flips_kernel(self, ts, rng):
        flipped = ts.model_copy(update={"flip_kernel": True})
        g = rng.integers(-5, 5, size=(4, 4, 4))
        d = Tensor3(rng.integers(-5, 5, size=(5, 5, 5)))
        a = f3dc_tile(Tensor3(g), d, flipped)
        b = f3dc_tile(Tensor3(g[::-1, ::-1, ::-1]), d, ts)
        assert a == b


def direct_tile_float(g, d):
    y = np.zeros((6, 6, 6))
    for m in np.ndindex(6, 6, 6):
        for j in np.ndindex(5, 5, 5):
            q = tuple(mm + 3 - 2 * jj for mm, jj in zip(m, j))
            if all(0 <= qq < 4 for qq in q):
                y[m] += g[q] * d[j]
    return y


class TestApplyTransform:
    def test_equals_generic_mode_product(self, rng):
        m = Matrix2.from_rows([[1, 0, "-1/2"], [2, -1, 0], [3, "1/4", -4]])
        for dtype in (np.int64, np.float64):
            array = rng.integers(-1000, 1000, size=(2, 3, 3, 3)).astype(dtype)
            for axis in range(1, 4):
                assert np.array_equal(apply_transform(array, m, axis), mode_product_array(array, m.data, axis))

    def test_integer_shifts_stay_integer(self, rng):
        m = Matrix2.from_rows([[2, -4], [1, 0]])
        array = rng.integers(-100, 100, size=(2, 5))
        out = apply_transform(array, m, 0)
        assert out.dtype == np.int64
        assert np.array_equal(out, m.data @ array)

    def test_extent_mismatch(self):
        with pytest.raises(ShapeError):
            apply_transform(np.zeros((3, 4)), Matrix2.identity(3), 1)


class TestTextFormat:
    def test_dump_and_parse(self, ts):
        text = dump_transform_set(ts)
        assert "[H]" in text and "1/2" in text
        assert parse_transform_set(text) == ts

    def test_save_and_load(self, ts, tmp_path):
        path = tmp_path / "set.tset"
        save_transform_set(ts, path)
        assert load_transform_set(path) == ts

    def test_bad_entry_reports_line(self, ts):
        lines = dump_transform_set(ts).splitlines()
        index = lines.index("[Pt]") + 1
        lines[index] = "1 0 x 0 0"
        with pytest.raises(TransformSetError) as excinfo:
            parse_transform_set("\n".join(lines))
        assert excinfo.value.line == index + 1

    def test_unknown_key(self):
        with pytest.raises(TransformSetError, match="line 2"):
            parse_transform_set("r 3\nwidth 4\n")

    def test_bad_boolean(self, ts):
        text = dump_transform_set(ts).replace("flip_kernel false", "flip_kernel maybe")
        with pytest.raises(TransformSetError) as excinfo:
            parse_transform_set(text)
        assert excinfo.value.line == 6

    def test_missing_section(self, ts):
        text = dump_transform_set(ts).split("[At]")[0]
        with pytest.raises(TransformSetError, match=r"\[At\]"):
            parse_transform_set(text)

    def test_inconsistent_shapes(self, ts):
        text = dump_transform_set(ts).replace("k 4", "k 3")
        with pytest.raises(TransformSetError, match="inconsistent"):
            parse_transform_set(text)

    def test_resolve_prefers_explicit_path(self, ts, tmp_path, monkeypatch):
        renamed = ts.model_copy(update={"name": "from_file"})
        path = tmp_path / "custom.tset"
        save_transform_set(renamed, path)
        assert resolve_transform_set(path).name == "from_file"
        monkeypatch.setattr(settings, "transform_set_path", str(path))
        assert resolve_transform_set().name == "from_file"
        monkeypatch.setattr(settings, "transform_set_path", None)
        assert resolve_transform_set() is builtin_t3_k4_s2()
