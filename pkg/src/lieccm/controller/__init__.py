from .gains import ab_values, rho_gain, sampling_period
from .path_integral import open_loop_step, path_controls, path_energy, path_from_curve
from .reference import IntegratedReference, ReferenceTrajectory, TabulatedReference
from .sampled_data import estimate_k, fit_decay_rate, sampled_data_run

__all__ = [
    "IntegratedReference",
    "ReferenceTrajectory",
    "TabulatedReference",
    "ab_values",
    "estimate_k",
    "fit_decay_rate",
    "open_loop_step",
    "path_controls",
    "path_energy",
    "path_from_curve",
    "rho_gain",
    "sampled_data_run",
    "sampling_period",
]
