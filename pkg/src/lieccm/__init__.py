from .controller import IntegratedReference, TabulatedReference, rho_gain, sampled_data_run, sampling_period
from .exceptions import (
    CCMError,
    CertificateViolationError,
    ComponentError,
    ConfigError,
    CutLocusError,
    InvalidInputError,
    OffManifoldError,
)
from .geodesics import group_distance, group_geodesic, lemma1_check, matrix_log_rotation, minimize_energy
from .manifolds import EmbeddedManifold, get_manifold
from .models import DiscretizedPath, GeodesicCurve, TrackingTrace, VerificationReport
from .synthesis import ContractionCertificate, MetricParameterization, SynthesisOptions, metric_at, synthesize, verify
from .systems import ControlAffineSystem, builtin_system

__all__ = [
    "EmbeddedManifold",
    "get_manifold",
    "ControlAffineSystem",
    "builtin_system",
    "ContractionCertificate",
    "MetricParameterization",
    "SynthesisOptions",
    "synthesize",
    "verify",
    "metric_at",
    "rho_gain",
    "sampling_period",
    "sampled_data_run",
    "IntegratedReference",
    "TabulatedReference",
    "group_geodesic",
    "group_distance",
    "minimize_energy",
    "matrix_log_rotation",
    "lemma1_check",
    "DiscretizedPath",
    "GeodesicCurve",
    "TrackingTrace",
    "VerificationReport",
    "CCMError",
    "InvalidInputError",
    "OffManifoldError",
    "CertificateViolationError",
    "CutLocusError",
    "ComponentError",
    "ConfigError",
]
