"""
Reference 3D transposed convolution

Two independent ground-truth implementations:
- deconv3d_zim: insert s-1 zeros between input samples, re-pad by p_t = k-p-1
  and run a stride-1 convolution with the kernel flipped on all three axes.
- deconv3d_iom: scatter form, each input voxel x[j] adds x[j]*g into the
  output window starting at j*s - p.

Both compute y[n] = sum over s*j + q = n + p of x[j] * g[q] per axis, the
adjoint of strided cross-correlation. They are deliberately naive: the full
k^3 multiply-accumulate per output is executed (vectorized over voxels only).
"""
import numpy as np
import structlog

from f3dc.errors import GeometryError, ShapeError
from f3dc.models.geometry import DeconvGeometry, WeightBank, ZimPlan
from f3dc.models.tensor import ChannelVolume, ElementKind

logger = structlog.get_logger()


def conv_out_size(i: int, k: int, s: int, p: int) -> int:
    """Output size of a strided convolution: floor((i + 2p - k) / s) + 1."""
    if k < 1 or s < 1 or p < 0 or i < 0:
        raise GeometryError(f"invalid convolution parameters i={i}, k={k}, s={s}, p={p}")
    if i + 2 * p < k:
        raise GeometryError(f"window k={k} is larger than the padded input {i} + 2*{p}")
    return (i + 2 * p - k) // s + 1


def zim_plan(geom: DeconvGeometry) -> ZimPlan:
    """Zero-insertion parameters of the stride-1 convolution equivalent to `geom`."""
    p_t = geom.k - geom.p - 1
    if p_t < 0:
        raise GeometryError(f"padding p={geom.p} must be smaller than k={geom.k}")
    i_t = geom.i + (geom.s - 1) * (geom.i - 1)
    o_t = conv_out_size(i_t, geom.k, 1, p_t)
    if o_t != geom.o:
        raise GeometryError(f"zero-insertion output {o_t} disagrees with deconvolution output {geom.o}")
    return ZimPlan(i_t=i_t, p_t=p_t, k_t=geom.k, s_t=1, o_t=o_t)


def zero_fraction(geom: DeconvGeometry) -> float:
    """Share of zeros in the zero-inserted, re-padded input volume."""
    plan = zim_plan(geom)
    padded = plan.i_t + 2 * plan.p_t
    return 1.0 - geom.i ** 3 / padded ** 3


def check_layer_operands(x: ChannelVolume, w: WeightBank, geom: DeconvGeometry) -> ElementKind:
    """Validate operand shapes against the geometry; returns the result kind."""
    if x.channels != w.c_in:
        raise ShapeError(f"input has {x.channels} channels, weights expect c_in={w.c_in}")
    if x.dims != (geom.i,) * 3:
        raise ShapeError(f"input volume {x.dims} is not the cubic {geom.i}^3 of the geometry")
    if w.k != geom.k:
        raise ShapeError(f"weights hold {w.k}^3 kernels, geometry says k={geom.k}")
    return ElementKind.promote(x.kind, w.kind)


def deconv3d_zim(x: ChannelVolume, w: WeightBank, geom: DeconvGeometry) -> ChannelVolume:
    """Zero-insertion method."""
    kind = check_layer_operands(x, w, geom)
    plan = zim_plan(geom)
    s, k, o = geom.s, geom.k, plan.o_t

    inserted = np.zeros((x.channels, plan.i_t, plan.i_t, plan.i_t), dtype=kind.dtype)
    inserted[:, ::s, ::s, ::s] = x.data
    pad = plan.p_t
    padded = np.pad(inserted, ((0, 0), (pad, pad), (pad, pad), (pad, pad)))
    flipped = w.data[:, :, ::-1, ::-1, ::-1].astype(kind.dtype)

    out = np.zeros((w.c_out, o, o, o), dtype=kind.dtype)
    for a in range(k):
        for b in range(k):
            for c in range(k):
                window = padded[:, a:a + o, b:b + o, c:c + o]
                out += np.tensordot(flipped[:, :, a, b, c], window, axes=(1, 0))

    logger.debug("zim_deconvolved", i=geom.i, k=k, s=s, p=geom.p, c_in=w.c_in, c_out=w.c_out)
    return ChannelVolume(out, kind)


def deconv3d_iom(x: ChannelVolume, w: WeightBank, geom: DeconvGeometry) -> ChannelVolume:
    """Input-oriented mapping: scatter every input voxel times the kernel."""
    kind = check_layer_operands(x, w, geom)
    s, k, p, i = geom.s, geom.k, geom.p, geom.i
    full = (i - 1) * s + k
    span = (i - 1) * s + 1

    out = np.zeros((w.c_out, full, full, full), dtype=kind.dtype)
    xs = x.data.astype(kind.dtype)
    for a in range(k):
        for b in range(k):
            for c in range(k):
                contrib = np.tensordot(w.data[:, :, a, b, c].astype(kind.dtype), xs, axes=(1, 0))
                out[:, a:a + span:s, b:b + span:s, c:c + span:s] += contrib

    cropped = out[:, p:p + geom.o, p:p + geom.o, p:p + geom.o]
    logger.debug("iom_deconvolved", i=i, k=k, s=s, p=p, c_in=w.c_in, c_out=w.c_out)
    return ChannelVolume(cropped, kind)
