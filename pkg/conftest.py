import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent / "src"))

from lieccm.synthesis import ContractionCertificate, MetricParameterization, SynthesisOptions, synthesize  # noqa: E402
from lieccm.systems import o2xr_toy, scalar_linear, se3_heading  # noqa: E402


@pytest.fixture(scope="session")
def scalar_system():
    return scalar_linear()


@pytest.fixture(scope="session")
def se3_system():
    return se3_heading(k=1.0, e=(0.0, 0.0, 1.0))


@pytest.fixture(scope="session")
def scalar_unit_cert():
    """W ≡ 1 on ℝ¹ with λ = 0.5; every convexified condition holds with R1 = -1."""
    return ContractionCertificate(
        system="scalar-linear",
        manifold="rn",
        parameterization=MetricParameterization.constant(np.eye(1), 1, rho=0.0),
        lam=0.5,
        a1=0.1,
        a2=10.0,
    )


@pytest.fixture(scope="session")
def se3_unit_cert():
    """W ≡ I₆, ρ ≡ 1 on SE(3) with λ = 0.2."""
    return ContractionCertificate(
        system="se3-heading",
        system_params={"k": 1.0, "e": [0.0, 0.0, 1.0]},
        manifold="se3",
        parameterization=MetricParameterization.constant(np.eye(6), 12, rho=1.0),
        lam=0.2,
        a1=0.1,
        a2=10.0,
    )


@pytest.fixture(scope="session")
def o2xr_system():
    return o2xr_toy()


@pytest.fixture(scope="session")
def se3_cert(se3_system):
    """Constant metric synthesized for SE(3) heading control at λ = 0.2."""
    return synthesize(se3_system, 0.2, SynthesisOptions(grid_size=200, seed=0))
