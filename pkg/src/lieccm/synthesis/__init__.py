from .certificate import ContractionCertificate, metric_at
from .convex import ConvexSolution, killing_kernel, solve_constant_metric
from .parameterization import MetricParameterization, monomial_basis
from .residuals import GridData, evaluate_residuals, lmi_residuals, prepare_grid
from .sdpa import SDPAProblem, build_sdpa_problem, export_sdpa, read_sdpa, write_sdpa
from .solver import SynthesisOptions, synthesize, verify, verify_ambient

__all__ = [
    "ContractionCertificate",
    "ConvexSolution",
    "GridData",
    "MetricParameterization",
    "SDPAProblem",
    "SynthesisOptions",
    "build_sdpa_problem",
    "evaluate_residuals",
    "export_sdpa",
    "killing_kernel",
    "lmi_residuals",
    "metric_at",
    "monomial_basis",
    "prepare_grid",
    "read_sdpa",
    "solve_constant_metric",
    "synthesize",
    "verify",
    "verify_ambient",
    "write_sdpa",
]
