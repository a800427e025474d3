"""
Test data factories and naive reference loops
"""
import numpy as np

from f3dc.models.geometry import LayerSpec, WeightBank
from f3dc.models.tensor import ChannelVolume, ElementKind

ACT_MIN, ACT_MAX = -(1 << 15), (1 << 15) - 1
W_MIN, W_MAX = -128, 127


def random_volume(rng, c, i, lo=ACT_MIN, hi=ACT_MAX) -> ChannelVolume:
    return ChannelVolume(rng.integers(lo, hi, size=(c, i, i, i), endpoint=True, dtype=np.int64), ElementKind.INT64)


def random_bank(rng, c_out, c_in, k, lo=W_MIN, hi=W_MAX) -> WeightBank:
    return WeightBank(rng.integers(lo, hi, size=(c_out, c_in, k, k, k), endpoint=True, dtype=np.int64), ElementKind.INT64)


def layer(c_in=1, c_out=1, i=4, k=4, s=2, p=1, name="test") -> LayerSpec:
    return LayerSpec.build(name=name, c_in=c_in, c_out=c_out, i=i, k=k, s=s, p=p)


def naive_mode_product(t: list, matrix: list, mode: int) -> list:
    """Quadruple loop over nested lists: three output indices and one summation index."""
    dims = [len(t), len(t[0]), len(t[0][0])]
    out_dims = list(dims)
    out_dims[mode] = len(matrix)
    out = [[[0 for _ in range(out_dims[2])] for _ in range(out_dims[1])] for _ in range(out_dims[0])]
    for a in range(out_dims[0]):
        for b in range(out_dims[1]):
            for c in range(out_dims[2]):
                idx = [a, b, c]
                row = idx[mode]
                total = 0
                for x in range(dims[mode]):
                    coeff = matrix[row][x]
                    if coeff:
                        idx[mode] = x
                        total += coeff * t[idx[0]][idx[1]][idx[2]]
                out[a][b][c] = total
    return out


def naive_transform(t: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    nested, m = t.tolist(), matrix.tolist()
    for mode in range(3):
        nested = naive_mode_product(nested, m, mode)
    return np.array(nested)


def brute_force_deconv(x: np.ndarray, w: np.ndarray, i: int, k: int, s: int, p: int) -> np.ndarray:
    """y[co, n] += x[ci, j] * w[co, ci, q] wherever s*j + q = n + p on every axis."""
    o = (i - 1) * s + k - 2 * p
    c_out, c_in = w.shape[:2]
    y = np.zeros((c_out, o, o, o), dtype=np.int64)
    for co in range(c_out):
        for ci in range(c_in):
            for jd in range(i):
                for jh in range(i):
                    for jw in range(i):
                        v = int(x[ci, jd, jh, jw])
                        for qd in range(k):
                            nd = s * jd + qd - p
                            if not 0 <= nd < o:
                                continue
                            for qh in range(k):
                                nh = s * jh + qh - p
                                if not 0 <= nh < o:
                                    continue
                                for qw in range(k):
                                    nw = s * jw + qw - p
                                    if 0 <= nw < o:
                                        y[co, nd, nh, nw] += v * int(w[co, ci, qd, qh, qw])
    return y
