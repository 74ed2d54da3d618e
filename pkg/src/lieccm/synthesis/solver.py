import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from ..exceptions import InvalidInputError, NotTangentError, UnsupportedDegreeError
from ..infrastructure.linalg import central_difference, max_eig, sym
from ..models import AmbientVerificationReport, InfeasibilityReport, VerificationReport
from ..systems.base import ControlAffineSystem
from .certificate import ContractionCertificate, metric_at
from .convex import solve_constant_metric
from .parameterization import MetricParameterization
from .residuals import GridData, GridResiduals, evaluate_residuals, prepare_grid

logger = logging.getLogger(__name__)

# Slack on the metric bounds R0_lo, R0_hi ⪯ 0 for round-off.
BOUND_TOL = 1e-10
# Relative slack on the recovered-metric bounds, scaled by a2.
AMBIENT_TOL = 1e-8


@dataclass(frozen=True)
class SynthesisOptions:
    degree: int = 0
    grid_size: int = 200
    seed: int = 0
    a1: float = 0.1
    a2: float = 10.0
    eps_margin: float = 1e-6
    eps_kill: float = 1e-8
    max_iters: int = 500
    rho_mode: Literal["free", "zero"] = "free"
    rho_max: float = 1e4
    target_margin: float = 1e-3
    dense_factor: int = 10
    method: Literal["descent", "convex"] = "descent"
    solver: str | None = None

    def __post_init__(self):
        if not self.a2 >= self.a1 > 0:
            raise InvalidInputError(f"Metric bounds need a2 >= a1 > 0, got a1={self.a1}, a2={self.a2}")
        if self.grid_size <= 0 or self.max_iters < 0 or self.dense_factor <= 0:
            raise InvalidInputError("grid_size and dense_factor must be positive, max_iters non-negative")
        if self.eps_margin < 0 or self.eps_kill < 0 or self.rho_max <= 0:
            raise InvalidInputError("Tolerances must be non-negative and rho_max positive")
        if self.rho_mode not in ("free", "zero"):
            raise InvalidInputError(f"rho_mode must be 'free' or 'zero', got {self.rho_mode!r}")
        if self.method not in ("descent", "convex"):
            raise InvalidInputError(f"method must be 'descent' or 'convex', got {self.method!r}")
        if self.method == "convex" and self.degree != 0:
            raise UnsupportedDegreeError(f"Convex synthesis supports constant metrics only, got degree {self.degree}")

    @property
    def target(self) -> float:
        return max(self.target_margin, self.eps_margin)


@dataclass(frozen=True)
class _Margins:
    r1: np.ndarray
    r0_lo: np.ndarray
    r0_hi: np.ndarray
    killing: np.ndarray

    @property
    def worst(self):
        return float(self.r1.max()), float(self.r0_lo.max()), float(self.r0_hi.max()), float(self.killing.max())

    def failures(self, eps_margin: float, eps_kill: float):
        r1, lo, hi, kill = self.worst
        failures = []
        if r1 > -eps_margin:
            failures.append("R1")
        if lo > BOUND_TOL:
            failures.append("R0_lo")
        if hi > BOUND_TOL:
            failures.append("R0_hi")
        if kill > eps_kill:
            failures.append("R2")
        return tuple(failures)


def _margins(res: GridResiduals) -> _Margins:
    killing = np.linalg.norm(res.r2, axis=(2, 3)).max(axis=1) if res.r2.shape[1] else np.zeros(len(res.r1))
    return _Margins(
        r1=max_eig(res.r1)[0],
        r0_lo=max_eig(res.r0_lo)[0],
        r0_hi=max_eig(res.r0_hi)[0],
        killing=killing,
    )


def _outer(v: np.ndarray) -> np.ndarray:
    return np.einsum("pi,pj->pij", v, v)


def penalty(
    coeffs: np.ndarray,
    rho_coeffs: np.ndarray,
    grid: GridData,
    lam: float,
    a1: float,
    a2: float,
    target: float,
    with_gradient: bool = True,
):
    """Mean squared-hinge violation over the grid and its (sub)gradient.

    Extreme eigenvalues are differentiated through their eigenvectors,
    d λ_max(R) = vᵀ dR v.
    """
    res = evaluate_residuals(coeffs, rho_coeffs, grid, lam, a1, a2)
    l1, v1 = max_eig(res.r1)
    llo, vlo = max_eig(res.r0_lo)
    lhi, vhi = max_eig(res.r0_hi)
    h1 = np.maximum(l1 + target, 0.0)
    hlo = np.maximum(llo, 0.0)
    hhi = np.maximum(lhi, 0.0)
    n_points = grid.size
    value = float((h1 ** 2 + hlo ** 2 + hhi ** 2).sum() + (res.r2 ** 2).sum()) / n_points
    if not with_gradient:
        return value, None, None

    p1 = 2.0 * h1[:, None, None] * _outer(v1)
    g1 = grid.S_f.transpose(0, 2, 1) @ p1 + p1 @ grid.S_f + 2.0 * lam * p1
    grad = np.einsum("pk,pij->kij", grid.phi, g1) - np.einsum("pk,pij->kij", grid.dphi_f, p1)
    grad -= np.einsum("pk,pij->kij", grid.phi, 2.0 * hlo[:, None, None] * _outer(vlo))
    grad += np.einsum("pk,pij->kij", grid.phi, 2.0 * hhi[:, None, None] * _outer(vhi))

    r2 = res.r2
    sb_t = grid.S_b.transpose(0, 1, 3, 2)
    g2 = 2.0 * (sb_t @ r2 + r2 @ grid.S_b)
    grad += np.einsum("pk,pmij->kij", grid.phi, g2) - 2.0 * np.einsum("pmk,pmij->kij", grid.dphi_b, r2)

    quad = np.einsum("pi,pij,pj->p", v1, grid.EEt, v1)
    root = grid.phi @ rho_coeffs
    grad_rho = grid.phi.T @ (2.0 * h1 * (-2.0 * root * quad))

    grad = 0.5 * (grad + grad.transpose(0, 2, 1)) / n_points
    return value, grad, grad_rho / n_points


def _project(coeffs: np.ndarray, rho_coeffs: np.ndarray, options: SynthesisOptions):
    coeffs = 0.5 * (coeffs + coeffs.transpose(0, 2, 1))
    if options.rho_mode == "zero":
        rho_coeffs = np.zeros_like(rho_coeffs)
    else:
        bound = np.sqrt(options.rho_max)
        rho_coeffs = np.clip(rho_coeffs, -bound, bound)
    return coeffs, rho_coeffs


def _report(margins: _Margins, n_samples: int, seed: int, eps_margin: float, eps_kill: float) -> VerificationReport:
    r1, lo, hi, kill = margins.worst
    return VerificationReport(
        worst_r1=r1,
        worst_r0_lo=lo,
        worst_r0_hi=hi,
        worst_killing=kill,
        n_samples=n_samples,
        seed=seed,
        eps_margin=eps_margin,
        eps_kill=eps_kill,
        failures=margins.failures(eps_margin, eps_kill),
    )


def synthesize(
    system: ControlAffineSystem,
    lam: float,
    options: SynthesisOptions | None = None,
) -> ContractionCertificate | InfeasibilityReport:
    """Search for a reduced metric W(x) and multiplier ρ(x) on a seeded grid.

    The default method is penalized spectral descent with Armijo backtracking;
    ``method="convex"`` solves the constant-metric program with cvxpy instead.
    Either way a grid solution is accepted only when it also verifies on a
    denser fresh sample.
    """
    options = options or SynthesisOptions()
    if lam <= 0:
        raise InvalidInputError(f"Contraction rate must be positive, got {lam}")
    manifold = system.manifold
    points = manifold.sample_grid(options.grid_size, options.seed)
    transversality = system.transversality_check(points)
    if not transversality.passed:
        raise NotTangentError(
            f"{system.name}: fields {list(transversality.failing_fields)} violate the transversality condition"
        )

    rho0 = 0.0 if options.rho_mode == "zero" else 1.0
    param = MetricParameterization.initial(
        manifold.n_amb, manifold.n_dim, options.degree, 1.0 / np.sqrt(options.a1 * options.a2), rho0
    )
    grid = prepare_grid(param, system, points)
    logger.info(
        "Synthesizing CCM for %s: lambda=%g method=%s degree=%d grid=%d seed=%d",
        system.name, lam, options.method, options.degree, options.grid_size, options.seed,
    )
    if options.method == "convex":
        coeffs, rho_coeffs, reason = _solve_convex(system, lam, points, param, options)
        iteration = 0
    else:
        coeffs, rho_coeffs, iteration, reason = _descend(param, grid, lam, options)
    objective = penalty(coeffs, rho_coeffs, grid, lam, options.a1, options.a2, options.target, False)[0]
    objective *= grid.size
    margins = _margins(evaluate_residuals(coeffs, rho_coeffs, grid, lam, options.a1, options.a2))
    if reason:
        return _infeasible(reason, objective, iteration, grid, margins)

    # Acceptance on the grid uses eps_margin; the descent target only adds slack.
    candidate = ContractionCertificate(
        system=system.name,
        system_params=dict(system.params),
        manifold=manifold.name,
        parameterization=param.with_coeffs(coeffs, rho_coeffs),
        lam=float(lam),
        a1=options.a1,
        a2=options.a2,
        grid_seed=options.seed,
        grid_size=options.grid_size,
        eps_margin=options.eps_margin,
        eps_kill=options.eps_kill,
    )
    report = verify(candidate, system, options.dense_factor * options.grid_size, options.seed + 1)
    logger.info(
        "Synthesis finished after %d iterations: objective=%.3e dense verification %s",
        iteration, objective, "passed" if report.passed else f"failed {list(report.failures)}",
    )
    if not report.passed:
        return _infeasible("dense_verification_failed", objective, iteration, grid, margins, report)
    return candidate.with_report(report)


def _descend(param: MetricParameterization, grid: GridData, lam: float, options: SynthesisOptions):
    coeffs, rho_coeffs = _project(param.coeffs, param.rho_coeffs, options)
    args = (grid, lam, options.a1, options.a2, options.target)
    step = 1.0
    value, grad, grad_rho = penalty(coeffs, rho_coeffs, *args)
    iteration = 0
    while True:
        margins = _margins(evaluate_residuals(coeffs, rho_coeffs, grid, lam, options.a1, options.a2))
        if not margins.failures(options.target, options.eps_kill):
            return coeffs, rho_coeffs, iteration, ""
        if iteration >= options.max_iters:
            return coeffs, rho_coeffs, iteration, "max_iters"
        sq_norm = float((grad ** 2).sum() + (grad_rho ** 2).sum())
        if sq_norm == 0.0:
            return coeffs, rho_coeffs, iteration, "stalled"
        while step > 1e-14:
            trial = _project(coeffs - step * grad, rho_coeffs - step * grad_rho, options)
            trial_value = penalty(*trial, *args, with_gradient=False)[0]
            if trial_value <= value - 1e-4 * step * sq_norm:
                break
            step *= 0.5
        else:
            return coeffs, rho_coeffs, iteration, "stalled"
        coeffs, rho_coeffs = trial
        value, grad, grad_rho = penalty(coeffs, rho_coeffs, *args)
        iteration += 1
        logger.debug("iteration %d: objective=%.6e step=%.3e", iteration, value, step)
        step = min(2.0 * step, 1e6)


def _solve_convex(system, lam, points, param: MetricParameterization, options: SynthesisOptions):
    solution = solve_constant_metric(
        system, lam, points, options.a1, options.a2,
        rho_mode=options.rho_mode, rho_max=options.rho_max, solver=options.solver,
    )
    if not solution.solved:
        return param.coeffs, param.rho_coeffs, f"solver_{solution.status}"
    solved = MetricParameterization.constant(solution.W, param.n_amb, solution.rho)
    if solution.margin > -options.target:
        return solved.coeffs, solved.rho_coeffs, "margin"
    return solved.coeffs, solved.rho_coeffs, ""


def _infeasible(reason, objective, iterations, grid, margins, verification=None) -> InfeasibilityReport:
    scores = (
        np.maximum(margins.r1, 0.0) + np.maximum(margins.r0_lo, 0.0)
        + np.maximum(margins.r0_hi, 0.0) + margins.killing
    )
    worst = int(np.argmax(scores)) if np.any(scores > 0) else int(np.argmax(margins.r1))
    r1, lo, hi, kill = margins.worst
    logger.info("Synthesis failed (%s): objective=%.3e after %d iterations", reason, objective, iterations)
    return InfeasibilityReport(
        reason=reason,
        objective=float(objective),
        iterations=iterations,
        worst_point=tuple(float(c) for c in grid.points[worst]),
        worst_r1=r1,
        worst_r0_lo=lo,
        worst_r0_hi=hi,
        worst_killing=kill,
        verification=verification,
    )


def verify(
    cert: ContractionCertificate,
    system: ControlAffineSystem,
    n_samples: int,
    seed: int,
) -> VerificationReport:
    """Re-evaluate the convexified conditions of a certificate at fresh samples."""
    if n_samples <= 0:
        raise InvalidInputError(f"n_samples must be positive, got {n_samples}")
    param = cert.parameterization
    points = system.manifold.sample_grid(n_samples, seed)
    grid = prepare_grid(param, system, points)
    res = evaluate_residuals(param.coeffs, param.rho_coeffs, grid, cert.lam, cert.a1, cert.a2)
    report = _report(_margins(res), n_samples, seed, cert.eps_margin, cert.eps_kill)
    logger.info(
        "Verification of %s certificate on %d samples: worst R1=%.3e killing=%.3e -> %s",
        cert.system, n_samples, report.worst_r1, report.worst_killing,
        "pass" if report.passed else f"fail {list(report.failures)}",
    )
    return report


def verify_ambient(
    cert: ContractionCertificate,
    system: ControlAffineSystem,
    n_samples: int,
    seed: int,
    tol_kill: float = 1e-6,
    fd_step: float = 1e-5,
) -> AmbientVerificationReport:
    """Check the ambient-space conditions directly on the recovered metric M = P_S W⁻¹ P_Sᵀ.

    The bounds are generalized eigenvalues of SᵀMS against SᵀS, the
    contraction form is restricted to the tangent vectors annihilated by
    BᵀM, and the Killing residuals are restricted to T_xM.
    """
    manifold = system.manifold
    lower, upper, a1_form, killing = np.inf, -np.inf, -np.inf, 0.0
    for x in manifold.sample_grid(n_samples, seed):
        s = manifold.frame(x)
        metric = metric_at(cert, manifold, x)
        gram = s.T @ s
        eigs = scipy.linalg.eigh(sym(s.T @ metric @ s), gram, eigvals_only=True)
        lower = min(lower, float(eigs[0]) - cert.a1)
        upper = max(upper, float(eigs[-1]) - cert.a2)

        def d_metric(direction):
            return central_difference(
                lambda y: metric_at(cert, manifold, y), x, direction, fd_step, retract=manifold.retract
            )

        f_x = system.jacobian_f(x)
        form = d_metric(system.drift(x)) + metric @ f_x + f_x.T @ metric + 2.0 * cert.lam * metric
        kernel = scipy.linalg.null_space(system.input_matrix(x).T @ metric @ s)
        if kernel.size:
            basis = s @ kernel
            restricted = scipy.linalg.eigh(sym(basis.T @ form @ basis), basis.T @ basis, eigvals_only=True)
            a1_form = max(a1_form, float(restricted[-1]))
        for i in range(system.m):
            b_x = system.jacobian_b(i, x)
            q = d_metric(system.input_field(i, x)) + metric @ b_x + b_x.T @ metric
            killing = max(killing, float(np.linalg.norm(s.T @ q @ s)))

    failures = []
    if lower < -AMBIENT_TOL * cert.a2:
        failures.append("A0_lower")
    if upper > AMBIENT_TOL * cert.a2:
        failures.append("A0_upper")
    if a1_form >= 0.0:
        failures.append("A1")
    if killing > tol_kill:
        failures.append("A2")
    return AmbientVerificationReport(
        worst_a0_lower=lower,
        worst_a0_upper=upper,
        worst_a1=a1_form,
        worst_killing=killing,
        n_samples=n_samples,
        seed=seed,
        failures=tuple(failures),
    )

