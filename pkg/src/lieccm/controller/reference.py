from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np
import pandas as pd

from ..exceptions import InfeasibleReferenceError, InvalidInputError
from ..infrastructure.integrators import integrate_dense
from ..systems.base import ControlAffineSystem


class ReferenceTrajectory(ABC):
    """A reference pair (x⋆(t), u⋆(t)) on [0, t_end]."""

    def __init__(self, system: ControlAffineSystem, t_end: float):
        if t_end <= 0:
            raise InvalidInputError(f"Reference horizon must be positive, got {t_end}")
        self.system = system
        self.t_end = float(t_end)

    @abstractmethod
    def _state(self, t: float) -> np.ndarray: ...

    @abstractmethod
    def control(self, t: float) -> np.ndarray: ...

    def state(self, t: float) -> np.ndarray:
        t = min(max(float(t), 0.0), self.t_end)
        return self.system.manifold.retract(self._state(t))

    def check_feasible(self, tol: float = 1e-6, n_checks: int = 50, h: float = 1e-4) -> float:
        """Max of ‖ẋ⋆ - f - B u⋆‖ by central differences; raises above ``tol``."""
        worst = 0.0
        for t in np.linspace(h, self.t_end - h, n_checks):
            x_dot = (self.state(t + h) - self.state(t - h)) / (2.0 * h)
            x = self.state(t)
            residual = float(np.linalg.norm(x_dot - self.system.vector_field(x, self.control(t), t)))
            worst = max(worst, residual)
        if worst > tol:
            raise InfeasibleReferenceError(
                f"Reference is not a trajectory of {self.system.name}: residual {worst:.3e} > {tol:g}"
            )
        return worst


class IntegratedReference(ReferenceTrajectory):
    """x⋆ integrated from x⋆(0) under a constant u⋆."""

    def __init__(self, system: ControlAffineSystem, x0, u_star, t_end: float):
        super().__init__(system, t_end)
        self.x0 = system.manifold.require_on_manifold(x0)
        self.u_star = np.asarray(u_star, dtype=float).reshape(-1)
        self._sol = integrate_dense(system.closed_loop(self.u_star), self.t_end, self.x0)

    def _state(self, t):
        return self._sol(t)

    def control(self, t):
        return self.u_star.copy()


class TabulatedReference(ReferenceTrajectory):
    """Reference sampled on a time grid, linearly interpolated between rows."""

    def __init__(self, system: ControlAffineSystem, times, states, controls):
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float)
        controls = np.asarray(controls, dtype=float)
        if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
            raise InvalidInputError("Reference times must be strictly increasing with at least two rows")
        if states.shape != (len(times), system.manifold.n_amb) or controls.shape != (len(times), system.m):
            raise InvalidInputError(
                f"Reference table shapes {states.shape}, {controls.shape} do not match "
                f"n_amb={system.manifold.n_amb}, m={system.m}"
            )
        if times[0] != 0.0:
            raise InvalidInputError(f"Reference table must start at t=0, got {times[0]}")
        super().__init__(system, times[-1])
        self.times = times
        self.states = states
        self.controls = controls

    @classmethod
    def from_csv(cls, system: ControlAffineSystem, path) -> "TabulatedReference":
        """Read columns t, x0..x{n_amb-1}, u0..u{m-1}."""
        df = pd.read_csv(Path(path))
        x_cols = [f"x{i}" for i in range(system.manifold.n_amb)]
        u_cols = [f"u{i}" for i in range(system.m)]
        missing = [c for c in ["t", *x_cols, *u_cols] if c not in df.columns]
        if missing:
            raise InvalidInputError(f"{path}: missing reference columns {missing}")
        return cls(system, df["t"].to_numpy(), df[x_cols].to_numpy(), df[u_cols].to_numpy())

    def _interp(self, t, table):
        return np.array([np.interp(t, self.times, column) for column in table.T])

    def _state(self, t):
        return self._interp(t, self.states)

    def control(self, t):
        return self._interp(min(max(float(t), 0.0), self.t_end), self.controls)

    def check_feasible(self, tol: float = 1e-6, curvature: float = 1.0) -> float:
        """Max over rows of ‖Δx/Δt - f - B u‖ at the row midpoints.

        A chord of a smooth trajectory misses the vector field at its
        midpoint by O(Δt²), so row k is held to ``tol + curvature·Δt_k²``.
        The returned value is the worst residual less its row allowance.
        """
        dt = np.diff(self.times)
        slopes = np.diff(self.states, axis=0) / dt[:, None]
        mid_t = 0.5 * (self.times[:-1] + self.times[1:])
        mid_x = 0.5 * (self.states[:-1] + self.states[1:])
        mid_u = 0.5 * (self.controls[:-1] + self.controls[1:])
        manifold = self.system.manifold
        residuals = np.array([
            np.linalg.norm(
                manifold.tangent_project(x, slope) - self.system.vector_field(x, u, t)
            )
            for x, slope, u, t in zip((manifold.retract(x) for x in mid_x), slopes, mid_u, mid_t)
        ])
        excess = residuals - curvature * dt ** 2
        k = int(np.argmax(excess))
        if excess[k] > tol:
            raise InfeasibleReferenceError(
                f"Reference table is not a trajectory of {self.system.name}: residual {residuals[k]:.3e} "
                f"between t={self.times[k]:g} and t={self.times[k + 1]:g} exceeds {tol + curvature * dt[k] ** 2:.3e}"
            )
        return float(max(excess[k], 0.0))
