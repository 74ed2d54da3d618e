import logging
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from ..exceptions import ComponentError, InvalidInputError
from ..infrastructure.linalg import expm
from ..manifolds.base import EmbeddedManifold
from ..models import GeodesicCurve
from .rotation_log import matrix_log_rotation

logger = logging.getLogger(__name__)

MetricField = Callable[[np.ndarray], np.ndarray]


def _relative_log(m: EmbeddedManifold, p1: np.ndarray, p2: np.ndarray):
    r1, v1 = m.split(p1)
    r2, v2 = m.split(p2)
    if r1 is None:
        return None, v1, v2
    if np.sign(np.linalg.det(r1)) != np.sign(np.linalg.det(r2)):
        raise ComponentError(f"{m.name}: endpoints lie in different connected components")
    return matrix_log_rotation(r1.T @ r2), v1, v2


def group_geodesic(m: EmbeddedManifold, p1, p2, n_samples: int = 33) -> GeodesicCurve:
    """Induced-metric geodesic s ↦ (R₁ exp(s log(R₁ᵀR₂)), (1-s)v₁ + s v₂)."""
    if n_samples < 2:
        raise InvalidInputError(f"A geodesic needs at least 2 samples, got {n_samples}")
    p1 = m.require_on_manifold(p1)
    p2 = m.require_on_manifold(p2)
    log, v1, v2 = _relative_log(m, p1, p2)
    s = np.linspace(0.0, 1.0, n_samples)
    r1 = m.split(p1)[0]
    points = np.empty((n_samples, m.n_amb))
    for j, sj in enumerate(s):
        rotation = None if log is None else r1 @ expm(sj * log)
        points[j] = m.join(rotation, (1.0 - sj) * v1 + sj * v2)
    points[0], points[-1] = p1, p2

    length = _closed_form_length(log, v1, v2)
    return GeodesicCurve(
        manifold=m.name,
        s=s,
        points=points,
        length=length,
        cumulative_length=s * length,
        energy=length ** 2,
    )


def _closed_form_length(log, v1, v2) -> float:
    rot = 0.0 if log is None else float(np.sum(log ** 2))
    return float(np.sqrt(rot + np.sum((v2 - v1) ** 2)))


def group_distance(m: EmbeddedManifold, p1, p2) -> float:
    """Induced-metric distance √(‖log(R₁ᵀR₂)‖_F² + ‖v₂ - v₁‖²)."""
    p1 = m.require_on_manifold(p1)
    p2 = m.require_on_manifold(p2)
    return _closed_form_length(*_relative_log(m, p1, p2))


def curve_energy(curve: GeodesicCurve, metric: MetricField | None = None) -> float:
    """Trapezoidal ∫ γ'(s)ᵀ M(γ(s)) γ'(s) ds with symmetric-difference tangents."""
    s, points = curve.s, curve.points
    if len(s) < 2:
        return 0.0
    tangents = np.gradient(points, s, axis=0, edge_order=2 if len(s) > 2 else 1)
    if metric is None:
        integrand = np.einsum("ji,ji->j", tangents, tangents)
    else:
        integrand = np.array([t @ metric(x) @ t for t, x in zip(tangents, points)])
    return float(trapezoid(integrand, s))


class _ChordEnergy:
    """Discrete energy Σ Δγᵀ M(mid) Δγ / Δs with retracted midpoints."""

    def __init__(self, m: EmbeddedManifold, metric: MetricField | None, ds: float):
        self.m = m
        self.metric = metric
        self.ds = ds

    def segment(self, a: np.ndarray, b: np.ndarray) -> float:
        delta = b - a
        if self.metric is None:
            return float(delta @ delta) / self.ds
        mid = self.m.retract(0.5 * (a + b))
        return float(delta @ self.metric(mid) @ delta) / self.ds

    def total(self, nodes: np.ndarray) -> float:
        return sum(self.segment(nodes[j], nodes[j + 1]) for j in range(len(nodes) - 1))

    def length(self, nodes: np.ndarray) -> np.ndarray:
        seg = [np.sqrt(max(self.segment(nodes[j], nodes[j + 1]), 0.0) * self.ds) for j in range(len(nodes) - 1)]
        return np.concatenate([[0.0], np.cumsum(seg)])

    def gradient(self, nodes: np.ndarray, step: float) -> np.ndarray:
        """Tangent gradient per interior node by central differences along frame columns."""
        grad = np.zeros_like(nodes)
        for j in range(1, len(nodes) - 1):
            prev, node, nxt = nodes[j - 1], nodes[j], nodes[j + 1]
            frame = self.m.frame(node, check=False)
            frame = frame / np.linalg.norm(frame, axis=0)
            for c in frame.T:
                plus = self.m.retract(node + step * c)
                minus = self.m.retract(node - step * c)
                d = (
                    self.segment(prev, plus) + self.segment(plus, nxt)
                    - self.segment(prev, minus) - self.segment(minus, nxt)
                ) / (2.0 * step)
                grad[j] += d * c
        return grad


def minimize_energy(
    m: EmbeddedManifold,
    p1,
    p2,
    metric: MetricField | None = None,
    n_samples: int = 17,
    max_iters: int = 200,
    grad_tol: float = 1e-8,
    fd_step: float = 1e-6,
    metric_name: str | None = None,
) -> GeodesicCurve:
    """Energy-minimizing curve between p1 and p2 under an ambient metric field.

    Starts from the induced-metric group geodesic and runs gradient descent
    with backtracking on the interior nodes, retracting after each step. The
    energy never increases; ``converged`` is False when max_iters is reached.
    """
    init = group_geodesic(m, p1, p2, n_samples)
    ds = 1.0 / (n_samples - 1)
    energy_fn = _ChordEnergy(m, metric, ds)
    nodes = init.points.copy()
    energy = energy_fn.total(nodes)
    converged = False
    step = 1.0
    for iteration in range(max_iters + 1):
        grad = energy_fn.gradient(nodes, fd_step)
        sq_norm = float(np.sum(grad ** 2))
        if np.sqrt(sq_norm) <= grad_tol:
            converged = True
            break
        if iteration == max_iters:
            break
        while step > 1e-14:
            trial = nodes.copy()
            trial[1:-1] = [m.retract(y) for y in nodes[1:-1] - step * grad[1:-1]]
            trial_energy = energy_fn.total(trial)
            if trial_energy <= energy - 1e-4 * step * sq_norm:
                break
            step *= 0.5
        else:
            break
        nodes, energy = trial, trial_energy
        logger.debug("energy descent %d: energy=%.12e step=%.3e", iteration, energy, step)
        step = min(2.0 * step, 1.0)

    cumulative = energy_fn.length(nodes)
    return GeodesicCurve(
        manifold=m.name,
        s=init.s,
        points=nodes,
        length=float(cumulative[-1]),
        metric=metric_name or ("induced" if metric is None else "custom"),
        cumulative_length=cumulative,
        energy=energy,
        converged=converged,
    )


def chord_energy(m: EmbeddedManifold, points: np.ndarray, metric: MetricField | None = None) -> float:
    """The discrete energy minimized by minimize_energy, for uniformly spaced nodes."""
    points = np.asarray(points, dtype=float)
    return _ChordEnergy(m, metric, 1.0 / (len(points) - 1)).total(points)
