from dataclasses import asdict, dataclass, field
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class TransversalityReport:
    max_drift_residual: float
    max_input_residuals: Tuple[float, ...]
    tol: float
    failing_fields: Tuple[str, ...] = ()  # "f" or "b1".."bm"

    @property
    def passed(self) -> bool:
        return not self.failing_fields


@dataclass(frozen=True, eq=False)
class ReducedOperators:
    E: np.ndarray
    S_f: np.ndarray
    S_b: Tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class LMIResiduals:
    r0_lo: np.ndarray
    r0_hi: np.ndarray
    r1: np.ndarray
    r2: Tuple[np.ndarray, ...]


@dataclass(frozen=True)
class VerificationReport:
    worst_r1: float         # max λ_max(R1); must be <= -eps_margin
    worst_r0_lo: float      # max λ_max(R0_lo); must be <= 0
    worst_r0_hi: float      # max λ_max(R0_hi); must be <= 0
    worst_killing: float    # max ‖R2[i]‖_F; must be <= eps_kill
    n_samples: int
    seed: int
    eps_margin: float
    eps_kill: float
    failures: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        data = asdict(self)
        data["failures"] = list(self.failures)
        data["passed"] = self.passed
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        fields = {k: v for k, v in data.items() if k != "passed"}
        fields["failures"] = tuple(fields.get("failures", ()))
        return cls(**fields)


@dataclass(frozen=True)
class AmbientVerificationReport:
    worst_a0_lower: float   # min eigenvalue of M on T_xM minus a1; must be >= 0
    worst_a0_upper: float   # max eigenvalue of M on T_xM minus a2; must be <= 0
    worst_a1: float         # max of the A1 form on ker(BᵀM) ∩ T_xM; must be < 0
    worst_killing: float
    n_samples: int
    seed: int
    failures: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class InfeasibilityReport:
    reason: str
    objective: float
    iterations: int
    worst_point: Tuple[float, ...]
    worst_r1: float
    worst_r0_lo: float
    worst_r0_hi: float
    worst_killing: float
    verification: VerificationReport | None = None

    @property
    def passed(self) -> bool:
        return False

    def to_dict(self) -> dict:
        data = asdict(self)
        data["worst_point"] = list(self.worst_point)
        data["verification"] = self.verification.to_dict() if self.verification else None
        data["passed"] = False
        return data


@dataclass(frozen=True, eq=False)
class GeodesicCurve:
    manifold: str
    s: np.ndarray
    points: np.ndarray
    length: float
    metric: str = "induced"
    cumulative_length: np.ndarray | None = None
    energy: float | None = None
    converged: bool = True

    @property
    def n_samples(self) -> int:
        return len(self.s)


@dataclass(frozen=True, eq=False)
class DiscretizedPath:
    nodes: np.ndarray       # (N + 1, n_amb); node 0 follows x⋆, node N the plant
    controls: np.ndarray    # (N + 1, m)
    t: float
    energy: float = 0.0

    @property
    def N(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True, eq=False)
class TrackingTrace:
    times: np.ndarray
    states: np.ndarray
    reference: np.ndarray
    controls: np.ndarray
    d_induced: np.ndarray
    path_energy: np.ndarray
    h_residual: np.ndarray
    sample_times: np.ndarray
    sample_energies: np.ndarray
    period: float
    k_estimate: float = float("nan")


@dataclass(frozen=True, eq=False)
class Lemma1Report:
    premise_ok: bool
    premise_low: float      # min generalized eigenvalue of g2 w.r.t. g1 over samples
    premise_high: float     # max generalized eigenvalue
    d1: np.ndarray
    d2: np.ndarray
    failing_pairs: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.premise_ok and not self.failing_pairs
