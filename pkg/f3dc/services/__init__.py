"""
Computation services of the F3DC library
"""
from f3dc.services.engine_service import count_multiplies, deconv3d_f3dc, deconv3d_f3dc_quant, plan_tiles
from f3dc.services.oracle_service import deconv3d_iom, deconv3d_zim
from f3dc.services.transform_service import builtin_t3_k4_s2, f3dc_tile, resolve_transform_set

__all__ = [
    "builtin_t3_k4_s2",
    "count_multiplies",
    "deconv3d_f3dc",
    "deconv3d_f3dc_quant",
    "deconv3d_iom",
    "deconv3d_zim",
    "f3dc_tile",
    "plan_tiles",
    "resolve_transform_set",
]
