import numpy as np

from .base import EmbeddedManifold


class Euclidean(EmbeddedManifold):
    """The trivial case ℝⁿ: no constraints, S = Iₙ."""

    def __init__(self, n: int):
        super().__init__("rn", n, 0)

    def _h(self, x):
        return np.zeros(0)

    def _jac_h(self, x):
        return np.zeros((0, self.n_amb))

    def _frame(self, x):
        return np.eye(self.n_amb)

    def _retract(self, y):
        return np.array(y, dtype=float)

    def _sample(self, rng, component):
        return rng.standard_normal(self.n_amb)

    def split(self, x):
        return None, np.asarray(x, dtype=float)

    def join(self, rotation, vector):
        return np.asarray(vector, dtype=float).copy()

    def identity(self):
        return np.zeros(self.n_amb)
