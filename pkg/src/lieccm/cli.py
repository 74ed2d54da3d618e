"""Command-line front end: synthesize, verify, simulate, geodesic, export-sdpa.

Exit codes: 0 success, 2 method-level failure, 3 input error.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .controller import (
    IntegratedReference,
    TabulatedReference,
    fit_decay_rate,
    sampled_data_run,
    sampling_period,
)
from .exceptions import (
    CCMError,
    CertificateFormatError,
    ConfigError,
    InvalidInputError,
    OffManifoldError,
    UnsupportedDegreeError,
)
from .export import ExportService, dumps, from_json, to_csv, to_json
from .geodesics import group_geodesic
from .manifolds import get_manifold
from .models import InfeasibilityReport
from .synthesis import export_sdpa, synthesize, verify
from .systems import builtin_system

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 2
EXIT_INPUT = 3

INPUT_ERRORS = (ConfigError, CertificateFormatError, InvalidInputError, OffManifoldError, UnsupportedDegreeError)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


def _system(config: RunConfig):
    return builtin_system(config.system_name, config.system_params)


def _read_certificate(path: Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CertificateFormatError(f"{path}: cannot read certificate ({e.strerror})") from e
    return from_json(text, str(path))


def cmd_synthesize(config: RunConfig, out: Path | None = None) -> int:
    system = _system(config)
    lam = config.require_lambda()
    cert_path = out or config.output.certificate or Path("certificate.json")
    report_path = config.output.report or cert_path.with_suffix(".report.json")
    result = synthesize(system, lam, config.synthesis)
    if isinstance(result, InfeasibilityReport):
        _write_text(report_path, to_json(result))
        print(f"infeasible: {result.reason} (objective {result.objective:.3e})")
        return EXIT_FAILURE
    _write_text(cert_path, to_json(result))
    _write_text(report_path, to_json(result.report))
    print(f"verified: worst R1 {result.report.worst_r1:.3e}, worst killing {result.report.worst_killing:.3e}")
    return EXIT_OK


def cmd_verify(cert_path: Path, samples: int = 2000, seed: int | None = None, out: Path | None = None) -> int:
    cert = _read_certificate(cert_path)
    system = builtin_system(cert.system, cert.system_params)
    report = verify(cert, system, samples, cert.grid_seed + 2 if seed is None else seed)
    if out is not None:
        _write_text(out, to_json(report))
    else:
        sys.stdout.write(to_json(report))
    if report.passed:
        return EXIT_OK
    print(f"verification failed: {', '.join(report.failures)}")
    return EXIT_FAILURE


def _initial_state(config: RunConfig, manifold, x_star0: np.ndarray) -> np.ndarray:
    sim = config.simulation
    if sim.x0 is not None:
        return manifold.require_on_manifold(sim.x0)
    rng = np.random.default_rng(sim.x0_seed)
    direction = manifold.tangent_project(x_star0, rng.standard_normal(manifold.n_amb))
    norm = np.linalg.norm(direction)
    if norm == 0.0 or sim.x0_offset == 0.0:
        return x_star0.copy()
    return manifold.retract(x_star0 + sim.x0_offset * direction / norm)


def cmd_simulate(config: RunConfig, cert_path: Path, out: Path | None = None) -> int:
    cert = _read_certificate(cert_path)
    if not cert.matches(config.system_name, config.system_params):
        raise config.error(
            f"certificate is for system '{cert.system}' {cert.system_params}, "
            f"config names '{config.system_name}' {config.system_params}",
            "system",
            "name",
        )
    system = _system(config)
    manifold = system.manifold
    sim = config.simulation

    x_star0 = manifold.identity() if sim.x_star0 is None else manifold.require_on_manifold(sim.x_star0)
    u_star = np.zeros(system.m) if sim.u_star is None else np.asarray(sim.u_star)
    if sim.reference == "builtin":
        reference = IntegratedReference(system, x_star0, u_star, sim.t_end)
    else:
        reference = TabulatedReference.from_csv(system, config.resolve(sim.reference))
        x_star0 = reference.state(0.0)
    x0 = _initial_state(config, manifold, x_star0)

    if sim.period == "auto":
        period = sampling_period(cert.a1, cert.a2, sim.K, cert.lam, sim.k_target)
    else:
        period = float(sim.period)
    trace = sampled_data_run(cert, system, x0, reference, period, sim.dt, sim.t_end, sim.path_segments)

    rate = fit_decay_rate(trace.times, trace.d_induced)
    summary = {
        "system": system.name,
        "lambda": cert.lam,
        "period": trace.period,
        "dt": sim.dt,
        "t_end": sim.t_end,
        "path_segments": sim.path_segments,
        "fitted_rate": rate,
        "rate_ok": bool(np.isfinite(rate) and -rate >= 0.9 * cert.lam),
        "k_estimate": trace.k_estimate,
        "max_h_residual": float(trace.h_residual.max()),
        "initial_distance": float(trace.d_induced[0]),
        "final_distance": float(trace.d_induced[-1]),
        "sample_energies": trace.sample_energies,
    }
    trace_path = out or config.output.trace or Path("trace.csv")
    summary_path = config.output.summary or trace_path.with_suffix(".summary.json")
    _write_text(trace_path, to_csv(trace))
    _write_text(summary_path, dumps(summary))
    print(f"fitted decay rate {rate:.4f} (target <= {-0.9 * cert.lam:.4f})")
    return EXIT_OK


def _parse_point(text: str, flag: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as e:
        raise InvalidInputError(f"{flag}: expected a comma-separated list of numbers, got {text!r}") from e


def cmd_geodesic(group: str, start: str, end: str, nodes: int = 33, out: Path | None = None) -> int:
    p1 = _parse_point(start, "--from")
    p2 = _parse_point(end, "--to")
    manifold = get_manifold(group, n=p1.size)
    curve = group_geodesic(manifold, p1, p2, nodes)
    text = ExportService.to_csv(ExportService.curve_to_dataframe(curve))
    if out is not None:
        _write_text(out, text)
    else:
        sys.stdout.write(text)
    logger.info("geodesic length %.12g", curve.length)
    return EXIT_OK


def cmd_export_sdpa(config: RunConfig, out: Path | None = None) -> int:
    system = _system(config)
    lam = config.require_lambda()
    options = config.synthesis
    path = out or config.output.sdpa or Path("problem.dat-s")
    grid = system.manifold.sample_grid(options.grid_size, options.seed)
    problem = export_sdpa(
        system, lam, grid, path,
        a1=options.a1, a2=options.a2, eps_margin=options.eps_margin,
        eps_kill=options.eps_kill, degree=options.degree,
    )
    logger.info("exported %d blocks", problem.n_blocks)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lieccm", description="Control contraction metrics on embedded Lie groups.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="search for a certificate")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=lambda a: cmd_synthesize(load_config(a.config), a.out))

    p = sub.add_parser("verify", help="re-check a certificate on fresh samples")
    p.add_argument("--cert", type=Path, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=lambda a: cmd_verify(a.cert, a.samples, a.seed, a.out))

    p = sub.add_parser("simulate", help="sampled-data tracking run")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--cert", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=lambda a: cmd_simulate(load_config(a.config), a.cert, a.out))

    p = sub.add_parser("geodesic", help="sample the induced-metric geodesic between two points")
    p.add_argument("--group", required=True)
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="end", required=True)
    p.add_argument("--nodes", type=int, default=33)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=lambda a: cmd_geodesic(a.group, a.start, a.end, a.nodes, a.out))

    p = sub.add_parser("export-sdpa", help="write the sampled LMI problem in SDPA sparse format")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=lambda a: cmd_export_sdpa(load_config(a.config), a.out))
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CCMError as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
