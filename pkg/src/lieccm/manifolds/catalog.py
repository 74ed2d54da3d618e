from ..exceptions import InvalidInputError
from .base import EmbeddedManifold
from .euclidean import Euclidean
from .matrix_groups import o2xr, se3, so3

GROUP_NAMES = ("rn", "o2xr", "so3", "se3")


def get_manifold(name: str, n: int | None = None) -> EmbeddedManifold:
    """Look up a catalog group by name; "rn" takes its dimension from ``n`` or "rn:<n>"."""
    key = name.strip().lower()
    if key.startswith("rn"):
        if ":" in key:
            try:
                n = int(key.split(":", 1)[1])
            except ValueError as e:
                raise InvalidInputError(f"Bad Euclidean group name {name!r}") from e
        if n is None or n <= 0:
            raise InvalidInputError(f"Group 'rn' needs a positive dimension, got {n!r}")
        return Euclidean(n)
    factories = {"o2xr": o2xr, "so3": so3, "se3": se3}
    if key not in factories:
        raise InvalidInputError(f"Unknown group {name!r}; expected one of {list(GROUP_NAMES)}")
    return factories[key]()
