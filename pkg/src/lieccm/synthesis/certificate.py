from dataclasses import dataclass, field, replace

import numpy as np

from ..exceptions import InvalidInputError
from ..infrastructure.linalg import spd_inverse
from ..manifolds.base import EmbeddedManifold
from ..models import VerificationReport
from .parameterization import MetricParameterization

STATUS_VERIFIED = "verified"
STATUS_UNVERIFIED = "unverified"
STATUS_FAILED = "failed"


@dataclass(frozen=True, eq=False)
class ContractionCertificate:
    system: str
    manifold: str
    parameterization: MetricParameterization
    lam: float
    a1: float
    a2: float
    grid_seed: int = 0
    grid_size: int = 0
    eps_margin: float = 1e-6
    eps_kill: float = 1e-8
    system_params: dict = field(default_factory=dict)
    status: str = STATUS_UNVERIFIED
    report: VerificationReport | None = None

    def __post_init__(self):
        if not self.a2 >= self.a1 > 0:
            raise InvalidInputError(f"Metric bounds need a2 >= a1 > 0, got a1={self.a1}, a2={self.a2}")
        if self.lam <= 0:
            raise InvalidInputError(f"Contraction rate must be positive, got {self.lam}")
        if self.eps_margin < 0 or self.eps_kill < 0:
            raise InvalidInputError("Tolerances must be non-negative")

    @property
    def degree(self) -> int:
        return self.parameterization.degree

    def W(self, x, t: float = 0.0) -> np.ndarray:
        # v1 metrics are time-invariant; t is accepted for the (x, t) signature.
        return self.parameterization.W(x)

    def rho(self, x, t: float = 0.0) -> float:
        return self.parameterization.rho(x)

    def with_report(self, report: VerificationReport) -> "ContractionCertificate":
        status = STATUS_VERIFIED if report.passed else STATUS_FAILED
        return replace(self, report=report, status=status)

    def matches(self, system: str, params: dict) -> bool:
        return self.system == system and _normalize(self.system_params) == _normalize(params)


def _normalize(params: dict) -> dict:
    return {k: (list(map(float, v)) if isinstance(v, (list, tuple)) else float(v)) for k, v in params.items()}


def metric_at(cert: ContractionCertificate, manifold: EmbeddedManifold, x, t: float = 0.0) -> np.ndarray:
    """Ambient metric M = P_S W⁻¹ P_Sᵀ recovered from the reduced certificate."""
    projector = manifold.projector(x)
    return projector @ spd_inverse(cert.W(x, t)) @ projector.T
