from .base import ControlAffineSystem
from .builtin import BUILTIN_SYSTEMS, builtin_system, o2xr_toy, scalar_linear, se3_heading

__all__ = [
    "BUILTIN_SYSTEMS",
    "ControlAffineSystem",
    "builtin_system",
    "o2xr_toy",
    "scalar_linear",
    "se3_heading",
]
