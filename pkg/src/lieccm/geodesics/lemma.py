from typing import Callable, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..infrastructure.linalg import sym
from ..manifolds.base import EmbeddedManifold
from ..models import Lemma1Report
from .curves import group_geodesic, minimize_energy

MetricField = Callable[[np.ndarray], np.ndarray]


def _induced(x: np.ndarray) -> np.ndarray:
    return np.eye(x.size)


def lemma1_check(
    m: EmbeddedManifold,
    metric_1: MetricField | None,
    metric_2: MetricField | None,
    a1: float,
    a2: float,
    point_pairs: Sequence[Tuple[np.ndarray, np.ndarray]],
    n_samples: int = 17,
    max_iters: int = 100,
    premise_tol: float = 1e-9,
) -> Lemma1Report:
    """Check √a₁ d₁ ≤ d₂ ≤ √a₂ d₁ on point pairs.

    The premise a₁ g₁ ⪯ g₂ ⪯ a₂ g₁ is tested first on T_xM at the nodes of
    each induced geodesic. ``None`` stands for the induced metric.
    """
    g1 = metric_1 or _induced
    g2 = metric_2 or _induced
    low, high = np.inf, -np.inf
    d1, d2 = [], []
    for p, q in point_pairs:
        for x in group_geodesic(m, p, q, n_samples).points:
            s = m.frame(x, check=False)
            eigs = scipy.linalg.eigh(sym(s.T @ g2(x) @ s), sym(s.T @ g1(x) @ s), eigvals_only=True)
            low = min(low, float(eigs[0]))
            high = max(high, float(eigs[-1]))
        d1.append(minimize_energy(m, p, q, metric_1, n_samples, max_iters).length)
        d2.append(minimize_energy(m, p, q, metric_2, n_samples, max_iters).length)

    d1, d2 = np.array(d1), np.array(d2)
    premise_ok = bool(low >= a1 * (1.0 - premise_tol) and high <= a2 * (1.0 + premise_tol))
    slack = 1e-6 * (1.0 + d1)
    failing = np.nonzero((np.sqrt(a1) * d1 > d2 + slack) | (d2 > np.sqrt(a2) * d1 + slack))[0]
    return Lemma1Report(
        premise_ok=premise_ok,
        premise_low=low,
        premise_high=high,
        d1=d1,
        d2=d2,
        failing_pairs=tuple(int(i) for i in failing),
    )
