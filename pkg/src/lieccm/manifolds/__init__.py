from .base import EmbeddedManifold, projector_from_frame
from .catalog import GROUP_NAMES, get_manifold
from .euclidean import Euclidean
from .matrix_groups import MatrixGroupProduct, o2xr, se3, so3, so_basis

__all__ = [
    "EmbeddedManifold",
    "Euclidean",
    "GROUP_NAMES",
    "MatrixGroupProduct",
    "get_manifold",
    "o2xr",
    "projector_from_frame",
    "se3",
    "so3",
    "so_basis",
]
