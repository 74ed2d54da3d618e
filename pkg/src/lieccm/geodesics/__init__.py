from .curves import chord_energy, curve_energy, group_distance, group_geodesic, minimize_energy
from .lemma import lemma1_check
from .rotation_log import matrix_log_rotation, rotation_angle

__all__ = [
    "chord_energy",
    "curve_energy",
    "group_distance",
    "group_geodesic",
    "lemma1_check",
    "matrix_log_rotation",
    "minimize_energy",
    "rotation_angle",
]
