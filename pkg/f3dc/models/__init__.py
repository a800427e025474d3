"""
Data types of the F3DC library
"""
from f3dc.models.engine import AccumulationDomain, MultiplyCount, QuantSpec, TilePlan
from f3dc.models.geometry import DeconvGeometry, LayerSpec, WeightBank, ZimPlan
from f3dc.models.tensor import ChannelVolume, ElementKind, Matrix2, Tensor3
from f3dc.models.transform import TileDomain, TransformedTile, TransformSet

__all__ = [
    "AccumulationDomain",
    "ChannelVolume",
    "DeconvGeometry",
    "ElementKind",
    "LayerSpec",
    "Matrix2",
    "MultiplyCount",
    "QuantSpec",
    "Tensor3",
    "TileDomain",
    "TilePlan",
    "TransformedTile",
    "TransformSet",
    "WeightBank",
    "ZimPlan",
]
