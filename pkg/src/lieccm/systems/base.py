from typing import Callable, Sequence

import numpy as np

from ..exceptions import InvalidInputError, NotTangentError
from ..infrastructure.linalg import central_difference, numerical_jacobian
from ..manifolds.base import EmbeddedManifold, projector_from_frame
from ..models import ReducedOperators, TransversalityReport

VectorField = Callable[[np.ndarray, float], np.ndarray]
MatrixField = Callable[[np.ndarray, float], np.ndarray]


class ControlAffineSystem:
    """ẋ = f(x, t) + Σ uᵢ bᵢ(x, t) on an embedded manifold.

    Jacobians without an analytic map fall back to ambient central
    differences. Input indices are 0-based.
    """

    jacobian_step: float = 1e-6
    fd_step: float = 1e-5          # ambient step for D_f(P_Sᵀ)
    transversality_tol: float = 1e-9
    factor_tol: float = 1e-8

    def __init__(
        self,
        name: str,
        manifold: EmbeddedManifold,
        f: VectorField,
        b: Sequence[VectorField],
        jac_f: MatrixField | None = None,
        jac_b: Sequence[MatrixField | None] | None = None,
        autonomous: bool = True,
        params: dict | None = None,
    ):
        if not b:
            raise InvalidInputError(f"{name}: a control-affine system needs at least one input field")
        if jac_b is not None and len(jac_b) != len(b):
            raise InvalidInputError(f"{name}: got {len(jac_b)} input Jacobians for {len(b)} input fields")
        self.name = name
        self.manifold = manifold
        self._f = f
        self._b = tuple(b)
        self._jac_f = jac_f
        self._jac_b = tuple(jac_b) if jac_b is not None else (None,) * len(b)
        self.autonomous = autonomous
        self.params = dict(params or {})

    def __repr__(self) -> str:
        return f"ControlAffineSystem(name={self.name!r}, manifold={self.manifold.name!r}, m={self.m})"

    @property
    def m(self) -> int:
        return len(self._b)

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.m:
            raise InvalidInputError(f"{self.name}: input index {i} out of range for m={self.m}")

    def _check_control(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.shape != (self.m,):
            raise InvalidInputError(f"{self.name}: expected {self.m} inputs, got shape {u.shape}")
        return u

    # -- vector fields -----------------------------------------------------

    def drift(self, x, t: float = 0.0) -> np.ndarray:
        return np.asarray(self._f(np.asarray(x, dtype=float), t), dtype=float)

    def input_field(self, i: int, x, t: float = 0.0) -> np.ndarray:
        self._check_index(i)
        return np.asarray(self._b[i](np.asarray(x, dtype=float), t), dtype=float)

    def input_matrix(self, x, t: float = 0.0) -> np.ndarray:
        return np.column_stack([self.input_field(i, x, t) for i in range(self.m)])

    def vector_field(self, x, u, t: float = 0.0) -> np.ndarray:
        return self.drift(x, t) + self.input_matrix(x, t) @ self._check_control(u)

    def closed_loop(self, u) -> Callable[[float, np.ndarray], np.ndarray]:
        """ẋ = f + B u with u held constant, in integrator (t, x) order."""
        u = self._check_control(u)
        return lambda t, x: self.vector_field(x, u, t)

    # -- Jacobians ---------------------------------------------------------

    def jacobian_f(self, x, t: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._jac_f is not None:
            return np.asarray(self._jac_f(x, t), dtype=float)
        return numerical_jacobian(lambda y: self.drift(y, t), x, self.jacobian_step)

    def jacobian_b(self, i: int, x, t: float = 0.0) -> np.ndarray:
        self._check_index(i)
        x = np.asarray(x, dtype=float)
        if self._jac_b[i] is not None:
            return np.asarray(self._jac_b[i](x, t), dtype=float)
        return numerical_jacobian(lambda y: self.input_field(i, y, t), x, self.jacobian_step)

    def variational_matrix(self, x, u, t: float = 0.0) -> np.ndarray:
        """A(x, u, t) = ∂f/∂x + Σ uᵢ ∂bᵢ/∂x."""
        x = self.manifold.require_on_manifold(x)
        u = self._check_control(u)
        a = self.jacobian_f(x, t)
        for i, ui in enumerate(u):
            if ui != 0.0:
                a = a + ui * self.jacobian_b(i, x, t)
        return a

    # -- reduced operators -------------------------------------------------

    def factor_E(self, x, t: float = 0.0) -> np.ndarray:
        """E with B = S E, computed as (SᵀS)⁻¹SᵀB."""
        s = self.manifold.frame(x)
        b = self.input_matrix(x, t)
        e = projector_from_frame(s).T @ b
        residual = float(np.linalg.norm(s @ e - b))
        if residual > self.factor_tol:
            raise NotTangentError(
                f"{self.name}: input fields are not tangent (‖SE - B‖_F={residual:.3e})"
            )
        return e

    def _reduced(self, field: np.ndarray, jac: np.ndarray, x: np.ndarray) -> np.ndarray:
        manifold = self.manifold
        s = manifold.frame(x, check=False)
        p = projector_from_frame(s)
        d_pt = central_difference(
            lambda y: manifold.projector(y, check=False).T,
            x,
            field,
            self.fd_step,
            retract=manifold.retract,
        )
        return d_pt @ s + p.T @ jac @ s

    def reduced_drift(self, x, t: float = 0.0) -> np.ndarray:
        """S_f = D_f(P_Sᵀ) S + P_Sᵀ ∂f/∂x S."""
        x = self.manifold.require_on_manifold(x)
        return self._reduced(self.drift(x, t), self.jacobian_f(x, t), x)

    def reduced_input(self, x, t: float = 0.0, i: int = 0) -> np.ndarray:
        """S_{b_i} = D_{b_i}(P_Sᵀ) S + P_Sᵀ ∂b_i/∂x S."""
        self._check_index(i)
        x = self.manifold.require_on_manifold(x)
        return self._reduced(self.input_field(i, x, t), self.jacobian_b(i, x, t), x)

    def reduced_operators(self, x, t: float = 0.0) -> ReducedOperators:
        return ReducedOperators(
            E=self.factor_E(x, t),
            S_f=self.reduced_drift(x, t),
            S_b=tuple(self.reduced_input(x, t, i) for i in range(self.m)),
        )

    def transversality_check(self, samples: Sequence[np.ndarray], t: float = 0.0) -> TransversalityReport:
        """Max of ‖∂h/∂x f‖ and ‖∂h/∂x bᵢ‖ over the samples."""
        drift_res = 0.0
        input_res = [0.0] * self.m
        for x in samples:
            jac = self.manifold.jac_h(x)
            if jac.shape[0] == 0:
                continue
            drift_res = max(drift_res, float(np.linalg.norm(jac @ self.drift(x, t))))
            for i in range(self.m):
                input_res[i] = max(input_res[i], float(np.linalg.norm(jac @ self.input_field(i, x, t))))
        failing = []
        if drift_res > self.transversality_tol:
            failing.append("f")
        failing.extend(f"b{i + 1}" for i, r in enumerate(input_res) if r > self.transversality_tol)
        return TransversalityReport(
            max_drift_residual=drift_res,
            max_input_residuals=tuple(input_res),
            tol=self.transversality_tol,
            failing_fields=tuple(failing),
        )
