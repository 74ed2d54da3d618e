from typing import Callable, Tuple

import numpy as np
import scipy.linalg

from ..exceptions import CertificateDegenerateError, DegenerateInputError

# Relative floor on singular values before a rotation block counts as singular.
SINGULAR_TOL = 1e-12
# Condition-number ceiling for metric matrices W(x).
MAX_CONDITION = 1e12


def sym(a: np.ndarray) -> np.ndarray:
    """Symmetric part (A + Aᵀ)/2."""
    return 0.5 * (a + a.T)


def polar_factor(a: np.ndarray, special: bool = False) -> np.ndarray:
    """Orthogonal polar factor U Vᵀ of a square matrix (nearest orthogonal matrix).

    With ``special=True`` the result is forced into SO(n) by flipping the
    weakest singular direction when det(U Vᵀ) < 0.
    """
    u, s, vt = scipy.linalg.svd(a)
    if s[-1] <= SINGULAR_TOL * max(1.0, s[0]):
        raise DegenerateInputError(
            f"Rotation block is singular (smallest singular value {s[-1]:.3e})"
        )
    q = u @ vt
    if special and np.linalg.det(q) < 0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
        q = u @ vt
    return q


def expm(a: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(a)


def max_eig(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Largest eigenvalue and unit eigenvector of each symmetric matrix in a stack (..., n, n)."""
    w, v = np.linalg.eigh(0.5 * (a + np.swapaxes(a, -1, -2)))
    return w[..., -1], v[..., :, -1]


def spd_inverse(w: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    try:
        factor = scipy.linalg.cho_factor(sym(w))
    except np.linalg.LinAlgError as e:
        raise CertificateDegenerateError("Metric W(x) is not positive definite") from e
    inv = scipy.linalg.cho_solve(factor, np.eye(w.shape[0]))
    if np.linalg.cond(w) > MAX_CONDITION:
        raise CertificateDegenerateError(
            f"Metric W(x) is numerically singular (cond={np.linalg.cond(w):.3e})"
        )
    return sym(inv)


def central_difference(
    fun: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    direction: np.ndarray,
    step: float,
    retract: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Directional derivative of ``fun`` at x along ``direction``.

    Perturbed points are mapped back through ``retract`` when given, so the
    evaluation stays on the constraint set.
    """
    plus = x + step * direction
    minus = x - step * direction
    if retract is not None:
        plus, minus = retract(plus), retract(minus)
    return (fun(plus) - fun(minus)) / (2.0 * step)


def numerical_jacobian(
    fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Ambient central-difference Jacobian, shape (len(fun(x)), len(x))."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = 1.0
        cols.append(central_difference(fun, x, e, step))
    return np.column_stack(cols)
