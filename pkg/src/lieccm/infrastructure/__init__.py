from .integrators import integrate_dense, rk4_step
from .linalg import expm, max_eig, polar_factor, spd_inverse, sym

__all__ = ["expm", "integrate_dense", "max_eig", "polar_factor", "rk4_step", "spd_inverse", "sym"]
