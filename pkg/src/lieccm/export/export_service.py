"""Export service for certificates, reports, traces and curves.

Provides multiple export strategies:
- Pandas DataFrame (for analysis)
- CSV (traces and geodesic curves)
- JSON (certificates and reports)
"""

import json
import math
from dataclasses import asdict, is_dataclass
from typing import Any

import numpy as np
import pandas as pd

from ..exceptions import CCMError, CertificateFormatError
from ..models import GeodesicCurve, TrackingTrace, VerificationReport
from ..synthesis.certificate import ContractionCertificate
from ..synthesis.parameterization import MetricParameterization, exponents_to_monomial

FLOAT_FORMAT = "%.17g"


def _plain(value: Any) -> Any:
    """JSON-safe copy: arrays to lists, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def dumps(data: Any) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class ExportService:
    """Application-layer service turning result objects into tables and documents.

    Contains no numerics; every method is a pure transformation.
    """

    @staticmethod
    def trace_to_dataframe(trace: TrackingTrace) -> pd.DataFrame:
        """Columns t, x*, x_star*, u*, d_induced, path_energy, h_residual."""
        columns = {"t": trace.times}
        for i in range(trace.states.shape[1]):
            columns[f"x{i}"] = trace.states[:, i]
        for i in range(trace.reference.shape[1]):
            columns[f"x_star{i}"] = trace.reference[:, i]
        for i in range(trace.controls.shape[1]):
            columns[f"u{i}"] = trace.controls[:, i]
        columns["d_induced"] = trace.d_induced
        columns["path_energy"] = trace.path_energy
        columns["h_residual"] = trace.h_residual
        return pd.DataFrame(columns)

    @staticmethod
    def curve_to_dataframe(curve: GeodesicCurve) -> pd.DataFrame:
        """Columns s, p0..p{n_amb-1}, cumulative_length."""
        columns = {"s": curve.s}
        for i in range(curve.points.shape[1]):
            columns[f"p{i}"] = curve.points[:, i]
        cumulative = curve.cumulative_length if curve.cumulative_length is not None else curve.s * curve.length
        columns["cumulative_length"] = cumulative
        return pd.DataFrame(columns)

    @staticmethod
    def certificate_to_dataframe(cert: ContractionCertificate) -> pd.DataFrame:
        """One row per basis monomial with its exponents, W_k entries and r_k."""
        param = cert.parameterization
        rows = []
        for exps, coeff, rho in zip(param.basis_exponents(), param.coeffs, param.rho_coeffs):
            row = {"monomial": "*".join(f"x{i}" for i in exponents_to_monomial(exps)) or "1"}
            row.update({f"w{i}{j}": coeff[i, j] for i in range(param.n_dim) for j in range(param.n_dim)})
            row["rho_coeff"] = rho
            rows.append(row)
        return pd.DataFrame(rows)

    @staticmethod
    def report_to_dataframe(report) -> pd.DataFrame:
        data = report.to_dict() if hasattr(report, "to_dict") else asdict(report)
        data = {k: (", ".join(v) if isinstance(v, (list, tuple)) else v) for k, v in data.items() if not isinstance(v, dict)}
        return pd.DataFrame([data])

    @staticmethod
    def to_csv(df: pd.DataFrame) -> str:
        return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    @staticmethod
    def certificate_to_dict(cert: ContractionCertificate) -> dict:
        param = cert.parameterization
        return {
            "system": cert.system,
            "system_params": cert.system_params,
            "manifold": cert.manifold,
            "lambda": cert.lam,
            "a1": cert.a1,
            "a2": cert.a2,
            "degree": param.degree,
            "basis": param.basis_exponents(),
            "coeffs": [c.tolist() for c in param.coeffs],
            "rho_coeffs": param.rho_coeffs.tolist(),
            "grid_seed": cert.grid_seed,
            "grid_size": cert.grid_size,
            "eps_margin": cert.eps_margin,
            "eps_kill": cert.eps_kill,
            "status": cert.status,
            "report": cert.report.to_dict() if cert.report else None,
        }

    @staticmethod
    def certificate_to_json(cert: ContractionCertificate) -> str:
        return dumps(ExportService.certificate_to_dict(cert))

    @staticmethod
    def certificate_from_json(text: str, source: str = "<certificate>") -> ContractionCertificate:
        """Parse a certificate document; any structural problem raises CertificateFormatError."""
        try:
            data = json.loads(text)
            basis = [list(map(int, exps)) for exps in data["basis"]]
            if not basis:
                raise ValueError("empty basis")
            param = MetricParameterization(
                n_amb=len(basis[0]),
                degree=int(data["degree"]),
                monomials=tuple(exponents_to_monomial(e) for e in basis),
                coeffs=np.array(data["coeffs"], dtype=float),
                rho_coeffs=np.array(data["rho_coeffs"], dtype=float),
            )
            report = VerificationReport.from_dict(data["report"]) if data.get("report") else None
            return ContractionCertificate(
                system=str(data["system"]),
                system_params=dict(data.get("system_params") or {}),
                manifold=str(data["manifold"]),
                parameterization=param,
                lam=float(data["lambda"]),
                a1=float(data["a1"]),
                a2=float(data["a2"]),
                grid_seed=int(data["grid_seed"]),
                grid_size=int(data.get("grid_size", 0)),
                eps_margin=float(data["eps_margin"]),
                eps_kill=float(data["eps_kill"]),
                status=str(data.get("status", "unverified")),
                report=report,
            )
        except (ValueError, KeyError, TypeError, AttributeError, CCMError) as e:
            raise CertificateFormatError(f"{source}: invalid certificate ({e})") from e

    @staticmethod
    def report_to_json(report) -> str:
        if isinstance(report, dict):
            return dumps(report)
        if hasattr(report, "to_dict"):
            return dumps(report.to_dict())
        if is_dataclass(report):
            data = asdict(report)
            data["passed"] = report.passed
            return dumps(data)
        raise TypeError(f"Cannot export {type(report).__name__} as a report")


# Convenience functions for a simpler API
def to_df(obj) -> pd.DataFrame:
    """Export a trace, curve, certificate or report to a Pandas DataFrame.

    Convenience function that dispatches to the matching ExportService method.
    """
    if isinstance(obj, TrackingTrace):
        return ExportService.trace_to_dataframe(obj)
    if isinstance(obj, GeodesicCurve):
        return ExportService.curve_to_dataframe(obj)
    if isinstance(obj, ContractionCertificate):
        return ExportService.certificate_to_dataframe(obj)
    return ExportService.report_to_dataframe(obj)


def to_csv(obj) -> str:
    """Export a trace or curve to CSV text (17 significant digits, header row)."""
    return ExportService.to_csv(to_df(obj))


def to_json(obj) -> str:
    if isinstance(obj, ContractionCertificate):
        return ExportService.certificate_to_json(obj)
    return ExportService.report_to_json(obj)


def from_json(text: str, source: str = "<certificate>") -> ContractionCertificate:
    return ExportService.certificate_from_json(text, source)
