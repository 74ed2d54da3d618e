from typing import Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..infrastructure.integrators import rk4_step
from ..manifolds.base import EmbeddedManifold
from ..models import DiscretizedPath, GeodesicCurve
from ..synthesis.certificate import ContractionCertificate, metric_at
from ..systems.base import ControlAffineSystem
from .gains import ab_values, rho_gain


def path_controls(
    cert: ContractionCertificate,
    system: ControlAffineSystem,
    nodes: np.ndarray,
    u_star,
    t: float,
) -> Tuple[np.ndarray, float]:
    """Controls along the path from ∂u/∂s = -½ ρ Bᵀ M ∂x/∂s, and the path energy.

    The sum over s is first order and runs forward from u₀ = u⋆(t). ρ, B
    and M are evaluated at the retracted midpoint of each segment. The
    energy is trapezoidal over the nodes with symmetric-difference tangents.
    """
    manifold = system.manifold
    n_seg = len(nodes) - 1
    ds = 1.0 / n_seg
    controls = np.empty((n_seg + 1, system.m))
    controls[0] = np.asarray(u_star, dtype=float)
    for j in range(n_seg):
        delta = nodes[j + 1] - nodes[j]
        if not np.any(delta):
            controls[j + 1] = controls[j]
            continue
        mid = manifold.retract(0.5 * (nodes[j] + nodes[j + 1]))
        dx = manifold.tangent_project(mid, delta / ds)
        metric = metric_at(cert, manifold, mid, t)
        norm = float(np.linalg.norm(dx))
        if norm == 0.0:
            controls[j + 1] = controls[j]
            continue
        # ρ is invariant to scaling δx, so the gain sees unit-scale (𝔞, 𝔟).
        a, b = ab_values(cert, system, mid, dx / norm, t)
        rho = rho_gain(a, b, where=f"segment {j} at t={t:.6g}")
        correction = system.input_matrix(mid, t).T @ metric @ dx
        controls[j + 1] = controls[j] - 0.5 * rho * correction * ds
    return controls, path_energy(cert, manifold, nodes, t)


def path_energy(cert: ContractionCertificate, manifold: EmbeddedManifold, nodes: np.ndarray, t: float) -> float:
    """Trapezoidal ∫ δxᵀ M δx ds over the nodes, s uniform on [0, 1]."""
    if len(nodes) < 2:
        return 0.0
    s = np.linspace(0.0, 1.0, len(nodes))
    tangents = np.gradient(nodes, s, axis=0, edge_order=2 if len(nodes) > 2 else 1)
    integrand = np.empty(len(nodes))
    for j, (x, dx) in enumerate(zip(nodes, tangents)):
        dx = manifold.tangent_project(x, dx)
        integrand[j] = dx @ metric_at(cert, manifold, x, t) @ dx
    return float(trapezoid(integrand, s))


def open_loop_step(
    cert: ContractionCertificate,
    system: ControlAffineSystem,
    path: DiscretizedPath,
    u_star,
    dt: float,
) -> DiscretizedPath:
    """Advance every node one RK4 step under its own control, then retract.

    The returned path holds the advanced nodes at t + dt together with the
    controls applied over the step and the energy at its start.
    """
    controls, energy = path_controls(cert, system, path.nodes, u_star, path.t)
    manifold = system.manifold
    nodes = np.array([
        manifold.retract(rk4_step(system.closed_loop(u), path.t, x, dt))
        for x, u in zip(path.nodes, controls)
    ])
    return DiscretizedPath(nodes=nodes, controls=controls, t=path.t + dt, energy=energy)


def path_from_curve(curve: GeodesicCurve, t: float) -> DiscretizedPath:
    return DiscretizedPath(nodes=curve.points.copy(), controls=np.zeros((len(curve.points), 0)), t=t)
