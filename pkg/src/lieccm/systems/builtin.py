import numpy as np

from ..exceptions import InvalidInputError
from ..manifolds import Euclidean, o2xr, se3, so_basis
from .base import ControlAffineSystem

BUILTIN_SYSTEMS = ("se3-heading", "o2xr-toy", "scalar-linear")


def se3_heading(k: float = 1.0, e=(0.0, 0.0, 1.0)) -> ControlAffineSystem:
    """Ṙ = RΩ with Ω = Σ uᵢ Âᵢ, v̇ = -kv + Re on SE(3) ≅ SO(3) × ℝ³."""
    k = float(k)
    e = np.asarray(e, dtype=float).reshape(-1)
    if k <= 0:
        raise InvalidInputError(f"se3-heading: k must be positive, got {k}")
    if e.shape != (3,) or abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise InvalidInputError(f"se3-heading: e must be a unit vector in ℝ³, got {e.tolist()}")

    group = se3()
    algebra = so_basis(3)

    def f(x, t):
        r, v = group.split(x)
        return group.join(np.zeros((3, 3)), -k * v + r @ e)

    def jac_f(x, t):
        jac = np.zeros((12, 12))
        for i in range(3):
            jac[9 + i, 3 * i:3 * i + 3] = e
        jac[9:, 9:] = -k * np.eye(3)
        return jac

    def input_field(a):
        def b(x, t):
            r, _ = group.split(x)
            return group.join(r @ a, np.zeros(3))

        def jac_b(x, t):
            jac = np.zeros((12, 12))
            jac[:9, :9] = np.kron(np.eye(3), a.T)
            return jac

        return b, jac_b

    fields = [input_field(a) for a in algebra]
    return ControlAffineSystem(
        "se3-heading",
        group,
        f,
        [b for b, _ in fields],
        jac_f=jac_f,
        jac_b=[j for _, j in fields],
        params={"k": k, "e": e.tolist()},
    )


def o2xr_toy() -> ControlAffineSystem:
    """Angle directly controlled on O(2); ẋ = -x + (R e₀)₁."""
    group = o2xr()
    a = so_basis(2)[0]

    def f(x, t):
        r, v = group.split(x)
        return group.join(np.zeros((2, 2)), -v + r[0, 0])

    def jac_f(x, t):
        jac = np.zeros((5, 5))
        jac[4, 0] = 1.0
        jac[4, 4] = -1.0
        return jac

    def b(x, t):
        r, _ = group.split(x)
        return group.join(r @ a, np.zeros(1))

    def jac_b(x, t):
        jac = np.zeros((5, 5))
        jac[:4, :4] = np.kron(np.eye(2), a.T)
        return jac

    return ControlAffineSystem("o2xr-toy", group, f, [b], jac_f=jac_f, jac_b=[jac_b])


def scalar_linear() -> ControlAffineSystem:
    """ẋ = -x + u on ℝ¹."""
    return ControlAffineSystem(
        "scalar-linear",
        Euclidean(1),
        lambda x, t: -x,
        [lambda x, t: np.ones(1)],
        jac_f=lambda x, t: -np.eye(1),
        jac_b=[lambda x, t: np.zeros((1, 1))],
    )


def builtin_system(name: str, params: dict | None = None) -> ControlAffineSystem:
    params = dict(params or {})
    if name == "se3-heading":
        unknown = set(params) - {"k", "e"}
        if unknown:
            raise InvalidInputError(f"se3-heading: unknown parameters {sorted(unknown)}")
        return se3_heading(params.get("k", 1.0), params.get("e", (0.0, 0.0, 1.0)))
    if name == "o2xr-toy":
        return o2xr_toy()
    if name == "scalar-linear":
        return scalar_linear()
    raise InvalidInputError(f"Unknown system {name!r}; expected one of {list(BUILTIN_SYSTEMS)}")
