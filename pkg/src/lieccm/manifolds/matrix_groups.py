from itertools import combinations
from typing import List, Tuple

import numpy as np

from ..exceptions import InvalidInputError
from ..infrastructure.linalg import polar_factor
from .base import EmbeddedManifold

_SQRT_HALF = 1.0 / np.sqrt(2.0)


def so_basis(mu: int) -> List[np.ndarray]:
    """Orthonormal (Frobenius) basis of so(mu), ordered by index pairs (i, j), i < j.

    Each element has +1/√2 at (i, j) and -1/√2 at (j, i).
    """
    basis = []
    for i, j in combinations(range(mu), 2):
        a = np.zeros((mu, mu))
        a[i, j] = _SQRT_HALF
        a[j, i] = -_SQRT_HALF
        basis.append(a)
    return basis


def orthogonality_pairs(mu: int) -> List[Tuple[int, int]]:
    """Independent entries of RᵀR - I: the diagonal first, then the upper triangle."""
    return [(a, a) for a in range(mu)] + list(combinations(range(mu), 2))


class MatrixGroupProduct(EmbeddedManifold):
    """G × ℝ^l with G = O(mu) or SO(mu), embedded as (vec(R), v) ∈ ℝ^(mu² + l).

    vec is row-major. Frame columns are ordered vector directions first,
    then the left-invariant fields vec(R Â_k).
    """

    def __init__(self, name: str, mu: int, vector_dim: int, special: bool):
        self.mu = mu
        self.vector_dim = vector_dim
        self.special = special
        self._pairs = orthogonality_pairs(mu)
        self._algebra = so_basis(mu)
        super().__init__(name, mu * mu + vector_dim, len(self._pairs))

    def split(self, x):
        x = np.asarray(x, dtype=float)
        k = self.mu * self.mu
        return x[:k].reshape(self.mu, self.mu), x[k:]

    def join(self, rotation, vector):
        return np.concatenate([np.asarray(rotation, dtype=float).ravel(), np.asarray(vector, dtype=float)])

    def identity(self):
        return self.join(np.eye(self.mu), np.zeros(self.vector_dim))

    def _h(self, x):
        r, _ = self.split(x)
        gram = r.T @ r - np.eye(self.mu)
        return np.array([gram[a, b] for a, b in self._pairs])

    def _jac_h(self, x):
        r, _ = self.split(x)
        mu = self.mu
        jac = np.zeros((self.n_con, self.n_amb))
        for row, (a, b) in enumerate(self._pairs):
            for i in range(mu):
                jac[row, i * mu + a] += r[i, b]
                jac[row, i * mu + b] += r[i, a]
        return jac

    def _frame(self, x):
        r, _ = self.split(x)
        k = self.mu * self.mu
        frame = np.zeros((self.n_amb, self.n_dim))
        for col in range(self.vector_dim):
            frame[k + col, col] = 1.0
        for col, a in enumerate(self._algebra, start=self.vector_dim):
            frame[:k, col] = (r @ a).ravel()
        return frame

    def _retract(self, y):
        r, v = self.split(y)
        return self.join(polar_factor(r, special=self.special), v)

    def _sample(self, rng, component):
        if component not in (1, -1):
            raise InvalidInputError(f"component must be +1 or -1, got {component}")
        if component == -1 and self.special:
            raise InvalidInputError(f"{self.name} has a single connected component")
        q, upper = np.linalg.qr(rng.standard_normal((self.mu, self.mu)))
        q = q * np.sign(np.diag(upper))
        if np.sign(np.linalg.det(q)) != component:
            q[:, 0] = -q[:, 0]
        return self.join(q, rng.standard_normal(self.vector_dim))


def o2xr() -> MatrixGroupProduct:
    return MatrixGroupProduct("o2xr", mu=2, vector_dim=1, special=False)


def so3() -> MatrixGroupProduct:
    return MatrixGroupProduct("so3", mu=3, vector_dim=0, special=True)


def se3() -> MatrixGroupProduct:
    return MatrixGroupProduct("se3", mu=3, vector_dim=3, special=True)
