from abc import ABC, abstractmethod
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import InvalidInputError, NumericalRankError, OffManifoldError

SeedLike = int | np.random.Generator


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def projector_from_frame(frame: np.ndarray, rcond: float = 1e-10) -> np.ndarray:
    """P_S = S (SᵀS)⁻¹ for a frame with full column rank."""
    gram = frame.T @ frame
    if gram.size and np.linalg.cond(gram) > 1.0 / rcond:
        raise NumericalRankError(
            f"Frame is numerically rank deficient (cond(SᵀS)={np.linalg.cond(gram):.3e})"
        )
    if gram.size == 0:
        return frame.copy()
    return np.linalg.solve(gram, frame.T).T


class EmbeddedManifold(ABC):
    """A Lie group viewed as the zero set {x : h(x) = 0} inside ℝ^n_amb.

    Concrete groups implement the private hooks; the public operations add
    dimension and on-manifold checks. Instances carry no mutable state.
    """

    # Residual norm below which a point counts as on-manifold.
    tol_manifold: float = 1e-8

    def __init__(self, name: str, n_amb: int, n_con: int):
        if n_amb <= 0 or n_con < 0 or n_con >= n_amb:
            raise InvalidInputError(f"Invalid manifold dimensions n_amb={n_amb}, n_con={n_con}")
        self.name = name
        self.n_amb = n_amb
        self.n_con = n_con

    @property
    def n_dim(self) -> int:
        return self.n_amb - self.n_con

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, n_amb={self.n_amb}, n_dim={self.n_dim})"

    # -- hooks -------------------------------------------------------------

    @abstractmethod
    def _h(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _jac_h(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _frame(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _retract(self, y: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _sample(self, rng: np.random.Generator, component: int) -> np.ndarray: ...

    @abstractmethod
    def split(self, x: np.ndarray) -> Tuple[np.ndarray | None, np.ndarray]:
        """Return (rotation block as a matrix or None, vector block)."""

    @abstractmethod
    def join(self, rotation: np.ndarray | None, vector: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def identity(self) -> np.ndarray: ...

    # -- operations --------------------------------------------------------

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_amb,):
            raise InvalidInputError(
                f"{self.name}: expected an ambient vector of length {self.n_amb}, got shape {x.shape}"
            )
        return x

    def constraint_residual(self, x) -> np.ndarray:
        """h(x), zero exactly on the manifold."""
        return self._h(self._check_point(x))

    def jac_h(self, x) -> np.ndarray:
        """Jacobian of h at x, shape (n_con, n_amb)."""
        return self._jac_h(self._check_point(x))

    def residual_norm(self, x) -> float:
        """‖h(x)‖."""
        return float(np.linalg.norm(self.constraint_residual(x)))

    def is_on_manifold(self, x, tol: float | None = None) -> bool:
        return self.residual_norm(x) <= (self.tol_manifold if tol is None else tol)

    def require_on_manifold(self, x) -> np.ndarray:
        """Return x as an array, raising OffManifoldError when ‖h(x)‖ exceeds tol_manifold."""
        x = self._check_point(x)
        norm = float(np.linalg.norm(self._h(x)))
        if norm > self.tol_manifold:
            raise OffManifoldError(
                f"{self.name}: point is off the manifold (‖h(x)‖={norm:.3e} > {self.tol_manifold:.1e})"
            )
        return x

    def frame(self, x, check: bool = True) -> np.ndarray:
        """Orthonormal tangent frame S(x), shape (n_amb, n_dim)."""
        x = self.require_on_manifold(x) if check else np.asarray(x, dtype=float)
        return self._frame(x)

    def projector(self, x, check: bool = True) -> np.ndarray:
        """P_S = S(SᵀS)⁻¹."""
        return projector_from_frame(self.frame(x, check=check))

    def tangent_project(self, x, v, check: bool = True) -> np.ndarray:
        """Orthogonal projection of an ambient vector onto T_xM."""
        s = self.frame(x, check=check)
        return projector_from_frame(s) @ (s.T @ np.asarray(v, dtype=float))

    def retract(self, y) -> np.ndarray:
        """Nearest manifold point to an ambient vector (polar factor on rotation blocks)."""
        return self._retract(self._check_point(y))

    def random_point(self, seed: SeedLike, component: int = 1) -> np.ndarray:
        """Seeded random point on the given connected component (Haar on rotation blocks)."""
        return self._sample(as_generator(seed), component)

    def sample_grid(self, size: int, seed: SeedLike, component: int = 1) -> List[np.ndarray]:
        """``size`` points drawn from one generator seeded once."""
        if size <= 0:
            raise InvalidInputError(f"Grid size must be positive, got {size}")
        rng = as_generator(seed)
        return [self._sample(rng, component) for _ in range(size)]

    def frame_bound(self, samples: Sequence[np.ndarray]) -> float:
        """c_S: max over samples of the spectral norm of S(SᵀS)⁻¹."""
        return max(float(np.linalg.norm(self.projector(x), 2)) for x in samples)
