from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..models import LMIResiduals
from ..systems.base import ControlAffineSystem
from .parameterization import MetricParameterization


@dataclass(frozen=True, eq=False)
class GridData:
    """Per-point quantities of the reduced conditions that do not depend on W or ρ.

    Array axes: p grid point, k basis element, m input, i/j reduced coordinates.
    """

    points: np.ndarray   # (P, n_amb)
    phi: np.ndarray      # (P, K)      φ_k(x)
    dphi_f: np.ndarray   # (P, K)      D_f φ_k(x)
    dphi_b: np.ndarray   # (P, m, K)   D_{b_i} φ_k(x)
    S_f: np.ndarray      # (P, n, n)
    S_b: np.ndarray      # (P, m, n, n)
    EEt: np.ndarray      # (P, n, n)

    @property
    def size(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class GridResiduals:
    r0_lo: np.ndarray    # (P, n, n)
    r0_hi: np.ndarray    # (P, n, n)
    r1: np.ndarray       # (P, n, n)
    r2: np.ndarray       # (P, m, n, n)
    rho: np.ndarray      # (P,)


def prepare_grid(
    param: MetricParameterization,
    system: ControlAffineSystem,
    points: Sequence[np.ndarray],
    t: float = 0.0,
) -> GridData:
    phi, dphi_f, dphi_b, s_f, s_b, eet = [], [], [], [], [], []
    for x in points:
        ops = system.reduced_operators(x, t)
        grads = param.basis_gradients(x)
        phi.append(param.basis_values(x))
        dphi_f.append(grads @ system.drift(x, t))
        dphi_b.append(grads @ system.input_matrix(x, t))
        s_f.append(ops.S_f)
        s_b.append(np.stack(ops.S_b))
        eet.append(ops.E @ ops.E.T)
    return GridData(
        points=np.array(points, dtype=float),
        phi=np.array(phi),
        dphi_f=np.array(dphi_f),
        dphi_b=np.array(dphi_b).transpose(0, 2, 1),
        S_f=np.array(s_f),
        S_b=np.array(s_b),
        EEt=np.array(eet),
    )


def evaluate_residuals(
    coeffs: np.ndarray,
    rho_coeffs: np.ndarray,
    grid: GridData,
    lam: float,
    a1: float,
    a2: float,
) -> GridResiduals:
    """R0_lo, R0_hi, R1 and R2 at every grid point for the given coefficients."""
    n = coeffs.shape[1]
    eye = np.eye(n)
    w = np.einsum("pk,kij->pij", grid.phi, coeffs)
    df_w = np.einsum("pk,kij->pij", grid.dphi_f, coeffs)
    db_w = np.einsum("pmk,kij->pmij", grid.dphi_b, coeffs)
    rho = (grid.phi @ rho_coeffs) ** 2

    sf_w = grid.S_f @ w
    r1 = -df_w + sf_w + sf_w.transpose(0, 2, 1) + 2.0 * lam * w - rho[:, None, None] * grid.EEt
    sb_w = grid.S_b @ w[:, None, :, :]
    r2 = -db_w + sb_w + sb_w.transpose(0, 1, 3, 2)
    return GridResiduals(
        r0_lo=eye / a2 - w,
        r0_hi=w - eye / a1,
        r1=r1,
        r2=r2,
        rho=rho,
    )


def lmi_residuals(
    param: MetricParameterization,
    system: ControlAffineSystem,
    x,
    t: float = 0.0,
    *,
    lam: float,
    a1: float = 0.1,
    a2: float = 10.0,
) -> LMIResiduals:
    """Residual matrices of the convexified conditions at one point.

    R0_lo and R0_hi must be negative semidefinite, R1 negative definite with
    margin and each R2[i] zero. W is time-invariant, so ∂W/∂t vanishes.
    """
    x = system.manifold.require_on_manifold(x)
    grid = prepare_grid(param, system, [x], t)
    res = evaluate_residuals(param.coeffs, param.rho_coeffs, grid, lam, a1, a2)
    return LMIResiduals(
        r0_lo=res.r0_lo[0],
        r0_hi=res.r0_hi[0],
        r1=res.r1[0],
        r2=tuple(res.r2[0]),
    )

