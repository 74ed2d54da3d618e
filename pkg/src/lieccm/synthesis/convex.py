"""Constant-metric synthesis posed as a semidefinite program in cvxpy.

For a constant W the reduced conditions are linear matrix inequalities in
(W, ρ). The program maximizes the contraction margin t subject to

    S_f W + W S_fᵀ + 2λW - ρ EEᵀ ⪯ t I     at every grid point,
    I/a2 ⪯ W ⪯ I/a1,   0 ≤ ρ ≤ rho_max,
    S_b W + W S_bᵀ = 0.

W is parameterized over the common kernel of the Killing maps, so the
equalities hold exactly rather than to solver tolerance.
"""
import logging
from dataclasses import dataclass
from typing import Sequence

import cvxpy as cp
import numpy as np
import scipy.linalg

from ..systems.base import ControlAffineSystem
from .sdpa import killing_rows, sym_basis

logger = logging.getLogger(__name__)

# Fraction of the bound interval kept clear on each side against solver tolerance.
BOUND_SLACK = 1e-4
# Relative singular-value cutoff for the Killing kernel; S_b carries finite-difference noise.
KERNEL_RCOND = 1e-6

SOLVED = ("optimal", "optimal_inaccurate")


@dataclass(frozen=True, eq=False)
class ConvexSolution:
    W: np.ndarray | None
    rho: float
    margin: float
    status: str

    @property
    def solved(self) -> bool:
        return self.W is not None


def _from_coordinates(z: np.ndarray, basis: Sequence[np.ndarray]) -> np.ndarray:
    return sum(c * b for c, b in zip(z, basis))


def killing_kernel(system: ControlAffineSystem, points: Sequence[np.ndarray], t: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the W coordinates satisfying every Killing equality on the points."""
    basis = sym_basis(system.manifold.n_dim)
    rows = []
    for x in points:
        rows.extend(killing_rows(system.reduced_operators(x, t).S_b, basis))
    if not rows:
        return np.eye(len(basis))
    return scipy.linalg.null_space(np.array(rows), rcond=KERNEL_RCOND)


def solve_constant_metric(
    system: ControlAffineSystem,
    lam: float,
    points: Sequence[np.ndarray],
    a1: float,
    a2: float,
    rho_mode: str = "free",
    rho_max: float = 1e4,
    solver: str | None = None,
    t: float = 0.0,
) -> ConvexSolution:
    n = system.manifold.n_dim
    eye = np.eye(n)
    basis = sym_basis(n)
    kernel = killing_kernel(system, points, t)
    if kernel.shape[1] == 0:
        return ConvexSolution(None, 0.0, np.inf, "killing_kernel_empty")

    # W ranges over the Killing kernel, so the equalities hold by construction.
    z = cp.Variable(kernel.shape[1])
    W = 0
    for j, column in enumerate(kernel.T):
        W = W + z[j] * _from_coordinates(column, basis)
    margin = cp.Variable()
    rho = cp.Variable(nonneg=True) if rho_mode == "free" else 0.0

    constraints = []
    if a2 > a1:
        slack = BOUND_SLACK * (1.0 / a1 - 1.0 / a2)
        constraints += [W >> (1.0 / a2 + slack) * eye, W << (1.0 / a1 - slack) * eye]
    else:
        constraints.append(W == eye / a1)
    if rho_mode == "free":
        constraints.append(rho <= rho_max)
    for x in points:
        ops = system.reduced_operators(x, t)
        SW = ops.S_f @ W
        R1 = SW + SW.T + 2.0 * lam * W - rho * (ops.E @ ops.E.T)
        constraints.append(R1 << margin * eye)

    prob = cp.Problem(cp.Minimize(margin), constraints)
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError as e:
        logger.warning("Convex synthesis for %s: solver error %s", system.name, e)
        return ConvexSolution(None, 0.0, np.inf, "solver_error")
    logger.info("Convex synthesis for %s: status=%s margin=%s", system.name, prob.status, margin.value)
    if prob.status not in SOLVED or z.value is None:
        return ConvexSolution(None, 0.0, np.inf, str(prob.status))

    w = _from_coordinates(kernel @ z.value, basis)
    # No-op unless the solver overshoots a bound by more than the slack.
    eigs, vecs = np.linalg.eigh(w)
    w = (vecs * np.clip(eigs, 1.0 / a2, 1.0 / a1)) @ vecs.T
    rho_value = max(float(rho.value), 0.0) if rho_mode == "free" else 0.0
    return ConvexSolution(0.5 * (w + w.T), rho_value, float(margin.value), str(prob.status))
