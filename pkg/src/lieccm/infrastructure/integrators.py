from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ..exceptions import InfeasibleReferenceError

VectorField = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(fun: VectorField, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ẋ = fun(t, x)."""
    k1 = fun(t, x)
    k2 = fun(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = fun(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = fun(t + dt, x + dt * k3)
    return x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def integrate_dense(
    fun: VectorField,
    t_end: float,
    x0: np.ndarray,
    rtol: float = 1e-11,
    atol: float = 1e-12,
):
    """Integrate on [0, t_end] and return scipy's dense-output interpolant."""
    sol = solve_ivp(
        fun,
        (0.0, t_end),
        np.asarray(x0, dtype=float),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
    )
    if not sol.success:
        raise InfeasibleReferenceError(f"Reference integration failed: {sol.message}")
    return sol.sol
