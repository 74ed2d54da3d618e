from typing import Tuple

import numpy as np

from ..exceptions import CertificateViolationError, InvalidInputError
from ..infrastructure.linalg import central_difference
from ..synthesis.certificate import ContractionCertificate, metric_at
from ..systems.base import ControlAffineSystem

# Smallest 𝔟 accepted when 𝔞 > 0.
EPS_B = 1e-12


def rho_gain(a: float, b: float, eps_b: float = EPS_B, where: str = "") -> float:
    """ρ = (𝔞 + √(𝔞² + 𝔟²))/𝔟 for 𝔞 > 0, otherwise 0.

    With this choice 𝔞 - ρ𝔟 = -√(𝔞² + 𝔟²) < 0 whenever 𝔞 > 0.
    """
    if b < 0:
        raise InvalidInputError(f"b must be non-negative, got {b}")
    if a <= 0:
        return 0.0
    if b < eps_b:
        raise CertificateViolationError(
            f"Certificate violated{' at ' + where if where else ''}: a={a:.3e} > 0 with b={b:.3e} < {eps_b:g}"
        )
    return float((a + np.hypot(a, b)) / b)


def ab_values(
    cert: ContractionCertificate,
    system: ControlAffineSystem,
    x,
    dx,
    t: float = 0.0,
    fd_step: float = 1e-5,
) -> Tuple[float, float]:
    """(𝔞, 𝔟) for a tangent displacement δx at x.

    𝔞 = δxᵀ(D_f M + M ∂f/∂x + ∂f/∂xᵀ M + 2λM)δx and 𝔟 = ‖BᵀMδx‖², with
    D_f M by central differences along f with retraction. δx is projected
    onto T_xM first.
    """
    manifold = system.manifold
    x = manifold.require_on_manifold(x)
    dx = manifold.tangent_project(x, dx)
    if not np.any(dx):
        return 0.0, 0.0
    metric = metric_at(cert, manifold, x, t)
    d_metric = central_difference(
        lambda y: metric_at(cert, manifold, y, t),
        x,
        system.drift(x, t),
        fd_step,
        retract=manifold.retract,
    )
    f_x = system.jacobian_f(x, t)
    form = d_metric + metric @ f_x + f_x.T @ metric + 2.0 * cert.lam * metric
    a = float(dx @ form @ dx)
    projected = system.input_matrix(x, t).T @ metric @ dx
    return a, float(projected @ projected)


def sampling_period(a1: float, a2: float, K: float, lam: float, k_target: float) -> float:
    """T = ln(K √(a₂/a₁) / k)/λ, so that K √(a₂/a₁) e^{-λT} = k."""
    if not 0.0 < k_target < 1.0:
        raise InvalidInputError(f"k_target must lie in (0, 1), got {k_target}")
    if K < 1.0:
        raise InvalidInputError(f"K must be at least 1, got {K}")
    if lam <= 0 or not a2 >= a1 > 0:
        raise InvalidInputError(f"Need lambda > 0 and a2 >= a1 > 0, got lambda={lam}, a1={a1}, a2={a2}")
    return float(np.log(K * np.sqrt(a2 / a1) / k_target) / lam)
