from dataclasses import dataclass, replace
from itertools import combinations_with_replacement
from typing import List, Tuple

import numpy as np

from ..exceptions import InvalidInputError

Monomial = Tuple[int, ...]  # variable indices with repetition, () is the constant


def monomial_basis(n_amb: int, degree: int) -> Tuple[Monomial, ...]:
    """All monomials of total degree <= degree, constant first."""
    if degree not in (0, 1, 2):
        raise InvalidInputError(f"Metric degree must be 0, 1 or 2, got {degree}")
    basis: List[Monomial] = []
    for d in range(degree + 1):
        basis.extend(combinations_with_replacement(range(n_amb), d))
    return tuple(basis)


def monomial_to_exponents(monomial: Monomial, n_amb: int) -> List[int]:
    exps = [0] * n_amb
    for i in monomial:
        exps[i] += 1
    return exps


def exponents_to_monomial(exponents: List[int]) -> Monomial:
    return tuple(i for i, e in enumerate(exponents) for _ in range(int(e)))


@dataclass(frozen=True, eq=False)
class MetricParameterization:
    """W(x) = Σ_k φ_k(x) W_k and ρ(x) = (Σ_k φ_k(x) r_k)² over ambient monomials φ_k."""

    n_amb: int
    degree: int
    monomials: Tuple[Monomial, ...]
    coeffs: np.ndarray       # (n_basis, n_dim, n_dim), each slice symmetric
    rho_coeffs: np.ndarray   # (n_basis,)

    def __post_init__(self):
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != len(self.monomials):
            raise InvalidInputError(
                f"Expected {len(self.monomials)} coefficient matrices, got array of shape {self.coeffs.shape}"
            )
        if self.rho_coeffs.shape != (len(self.monomials),):
            raise InvalidInputError(f"Expected {len(self.monomials)} rho coefficients")
        if not np.allclose(self.coeffs, self.coeffs.transpose(0, 2, 1), rtol=0.0, atol=1e-12):
            raise InvalidInputError("Metric coefficient matrices must be symmetric")

    @classmethod
    def constant(cls, w: np.ndarray, n_amb: int, rho: float = 0.0) -> "MetricParameterization":
        """Degree-0 parameterization W(x) ≡ w, ρ(x) ≡ rho."""
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return cls(n_amb, 0, ((),), w[None, :, :].copy(), np.array([np.sqrt(max(rho, 0.0))]))

    @classmethod
    def initial(cls, n_amb: int, n_dim: int, degree: int, scale: float, rho: float) -> "MetricParameterization":
        monomials = monomial_basis(n_amb, degree)
        coeffs = np.zeros((len(monomials), n_dim, n_dim))
        coeffs[0] = scale * np.eye(n_dim)
        rho_coeffs = np.zeros(len(monomials))
        rho_coeffs[0] = np.sqrt(max(rho, 0.0))
        return cls(n_amb, degree, monomials, coeffs, rho_coeffs)

    @property
    def n_basis(self) -> int:
        return len(self.monomials)

    @property
    def n_dim(self) -> int:
        return self.coeffs.shape[1]

    def with_coeffs(self, coeffs: np.ndarray, rho_coeffs: np.ndarray) -> "MetricParameterization":
        return replace(self, coeffs=coeffs, rho_coeffs=rho_coeffs)

    def basis_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([np.prod(x[list(mono)]) if mono else 1.0 for mono in self.monomials])

    def basis_gradients(self, x) -> np.ndarray:
        """∂φ_k/∂x, shape (n_basis, len(x))."""
        x = np.asarray(x, dtype=float)
        grads = np.zeros((self.n_basis, x.size))
        for k, mono in enumerate(self.monomials):
            for pos, var in enumerate(mono):
                rest = mono[:pos] + mono[pos + 1:]
                grads[k, var] += np.prod(x[list(rest)]) if rest else 1.0
        return grads

    def W(self, x) -> np.ndarray:
        return np.einsum("k,kij->ij", self.basis_values(x), self.coeffs)

    def directional_W(self, x, v) -> np.ndarray:
        """D_v W(x) from the monomial gradients."""
        if self.degree == 0:
            return np.zeros((self.n_dim, self.n_dim))
        return np.einsum("k,kij->ij", self.basis_gradients(x) @ np.asarray(v, dtype=float), self.coeffs)

    def rho(self, x) -> float:
        return float(self.basis_values(x) @ self.rho_coeffs) ** 2

    def basis_exponents(self) -> List[List[int]]:
        return [monomial_to_exponents(mono, self.n_amb) for mono in self.monomials]
