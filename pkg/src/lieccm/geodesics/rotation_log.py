import numpy as np

from ..exceptions import CutLocusError, InvalidInputError

# Distance from π below which the principal logarithm is rejected.
CUT_LOCUS_MARGIN = 1e-6
# Below this angle θ/sin θ is replaced by its Taylor series.
SMALL_ANGLE = 1e-6


def rotation_angle(r: np.ndarray) -> float:
    """Rotation angle in [0, π] of an element of SO(2) or SO(3)."""
    r = np.asarray(r, dtype=float)
    if r.shape == (2, 2):
        return abs(float(np.arctan2(r[1, 0], r[0, 0])))
    if r.shape == (3, 3):
        axial = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]]) / 2.0
        cos_angle = (np.trace(r) - 1.0) / 2.0
        return float(np.arctan2(np.linalg.norm(axial), cos_angle))
    raise InvalidInputError(f"Expected a 2x2 or 3x3 rotation, got shape {r.shape}")


def matrix_log_rotation(r: np.ndarray) -> np.ndarray:
    """Principal logarithm of a rotation in SO(2) or SO(3) as a skew matrix.

    SO(2) uses the atan2 angle directly; SO(3) uses the Rodrigues closed form
    log R = θ/(2 sin θ) (R - Rᵀ). Angles within CUT_LOCUS_MARGIN of π have no
    unique minimizing geodesic and raise CutLocusError.
    """
    r = np.asarray(r, dtype=float)
    if r.shape not in ((2, 2), (3, 3)):
        raise InvalidInputError(f"Expected a 2x2 or 3x3 rotation, got shape {r.shape}")
    if np.linalg.det(r) <= 0:
        raise InvalidInputError("Matrix logarithm needs a rotation with det = +1")
    angle = rotation_angle(r)
    if angle >= np.pi - CUT_LOCUS_MARGIN:
        raise CutLocusError(f"Rotation angle {angle:.12f} is on the cut locus (within {CUT_LOCUS_MARGIN:g} of π)")

    if r.shape == (2, 2):
        theta = float(np.arctan2(r[1, 0], r[0, 0]))
        return theta * np.array([[0.0, -1.0], [1.0, 0.0]])

    if angle < SMALL_ANGLE:
        factor = 0.5 * (1.0 + angle ** 2 / 6.0)
    else:
        factor = angle / (2.0 * np.sin(angle))
    return factor * (r - r.T)
