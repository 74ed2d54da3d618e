"""TOML run configuration for the command-line harness.

Every validation error is anchored as ``<path>:<line>: <reason>``.
"""
import re
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 backport with the identical API
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

from .exceptions import ConfigError
from .synthesis.solver import SynthesisOptions
from .systems.builtin import BUILTIN_SYSTEMS

_SECTIONS = {
    "system": {"name", "k", "e"},
    "synthesis": {
        "lambda", "degree", "grid_size", "seed", "a1", "a2", "eps_margin", "eps_kill",
        "max_iters", "rho_mode", "rho_max", "target_margin", "method", "solver",
    },
    "simulation": {
        "t_end", "dt", "period", "path_segments", "reference", "x0", "x0_seed", "x0_offset",
        "x_star0", "u_star", "K", "k_target",
    },
    "output": {"certificate", "report", "trace", "summary", "sdpa"},
}

_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.-]+)\s*\]")
_KEY = re.compile(r"^\s*([A-Za-z0-9_-]+)\s*=")


def _line_index(text: str) -> Tuple[Dict[str, int], Dict[Tuple[str, str], int]]:
    """First line number of each section header and of each (section, key)."""
    headers, keys = {}, {}
    section = ""
    for number, line in enumerate(text.splitlines(), start=1):
        if m := _HEADER.match(line):
            section = m.group(1)
            headers.setdefault(section, number)
        elif m := _KEY.match(line):
            keys.setdefault((section, m.group(1)), number)
    return headers, keys


@dataclass(frozen=True)
class SimulationConfig:
    t_end: float = 10.0
    dt: float = 1e-3
    period: float | str = "auto"
    path_segments: int = 16
    reference: str = "builtin"
    x0: List[float] | None = None
    x0_seed: int = 0
    x0_offset: float = 0.5
    x_star0: List[float] | None = None
    u_star: List[float] | None = None
    K: float = 1.0
    k_target: float = 0.5


@dataclass(frozen=True)
class OutputConfig:
    certificate: Path | None = None
    report: Path | None = None
    trace: Path | None = None
    summary: Path | None = None
    sdpa: Path | None = None


@dataclass(frozen=True)
class RunConfig:
    path: Path
    system_name: str
    system_params: dict
    lam: float | None
    synthesis: SynthesisOptions
    simulation: SimulationConfig
    output: OutputConfig
    header_lines: Dict[str, int] = field(default_factory=dict, repr=False)
    key_lines: Dict[Tuple[str, str], int] = field(default_factory=dict, repr=False)

    def error(self, reason: str, section: str, key: str | None = None) -> ConfigError:
        """ConfigError anchored at the key's line, else the section header."""
        line = self.key_lines.get((section, key)) if key else None
        line = line or self.header_lines.get(section, 1)
        return ConfigError(f"{self.path}:{line}: {reason}")

    def require_lambda(self) -> float:
        """lambda, which synthesize and export-sdpa need."""
        if self.lam is None:
            raise self.error("missing required key 'lambda'", "synthesis")
        return self.lam

    def resolve(self, value: str | Path) -> Path:
        """Paths in the file are relative to the file's directory."""
        p = Path(value)
        return p if p.is_absolute() else self.path.parent / p


class _Reader:
    """Typed lookups into the parsed TOML that fail with the offending line."""

    def __init__(self, path: Path, data: dict, headers, keys):
        self.path = path
        self.data = data
        self.headers = headers
        self.keys = keys

    def fail(self, reason: str, section: str, key: str | None = None):
        """Raise ConfigError anchored at the key's line, else the section header."""
        line = self.keys.get((section, key)) if key else None
        line = line or self.headers.get(section, 1)
        raise ConfigError(f"{self.path}:{line}: {reason}")

    def section(self, name: str) -> dict:
        """The named table, empty when absent."""
        value = self.data.get(name, {})
        if not isinstance(value, dict):
            self.fail(f"'{name}' must be a table", name)
        return value

    def number(self, section, key, default, *, integer=False, positive=False, minimum=None):
        """A numeric value with optional integer and range checks; booleans are rejected."""
        table = self.section(section)
        if key not in table:
            return default
        value = table[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"'{key}' must be a number", section, key)
        if integer and not isinstance(value, int):
            self.fail(f"'{key}' must be an integer", section, key)
        if positive and value <= 0:
            self.fail(f"'{key}' must be positive, got {value}", section, key)
        if minimum is not None and value < minimum:
            self.fail(f"'{key}' must be at least {minimum}, got {value}", section, key)
        return value if integer else float(value)

    def vector(self, section, key):
        """An array of numbers as floats, or None when absent."""
        table = self.section(section)
        if key not in table:
            return None
        value = table[key]
        if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            self.fail(f"'{key}' must be an array of numbers", section, key)
        return [float(v) for v in value]

    def string(self, section, key, default=None):
        """A string value, or ``default`` when absent."""
        table = self.section(section)
        if key not in table:
            return default
        if not isinstance(table[key], str):
            self.fail(f"'{key}' must be a string", section, key)
        return table[key]


def load_config(path) -> RunConfig:
    """Read and validate a TOML run file; every error names the file and line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}:1: cannot read configuration ({e.strerror})") from e
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        m = re.search(r"line (\d+)", str(e))
        raise ConfigError(f"{path}:{m.group(1) if m else 1}: {e}") from e
    return parse_config(path, text, data)


def parse_config(path: Path, text: str, data: dict) -> RunConfig:
    """Validate parsed TOML against the known sections and keys."""
    headers, keys = _line_index(text)
    r = _Reader(path, data, headers, keys)

    for section, table in data.items():
        if section not in _SECTIONS:
            r.fail(f"unknown section [{section}]", section)
        if isinstance(table, dict):
            for key in table:
                if key not in _SECTIONS[section]:
                    r.fail(f"unknown key '{key}' in [{section}]", section, key)

    name = r.string("system", "name")
    if name is None:
        r.fail("missing required key 'name' in [system]", "system")
    if name not in BUILTIN_SYSTEMS:
        r.fail(f"unknown system '{name}', expected one of {list(BUILTIN_SYSTEMS)}", "system", "name")
    params = {}
    if name == "se3-heading":
        params["k"] = r.number("system", "k", 1.0, positive=True)
        e = r.vector("system", "e")
        params["e"] = e if e is not None else [0.0, 0.0, 1.0]
        if len(params["e"]) != 3 or abs(sum(c * c for c in params["e"]) - 1.0) > 1e-9:
            r.fail("'e' must be a unit vector of length 3", "system", "e")
    elif "k" in r.section("system") or "e" in r.section("system"):
        r.fail(f"system '{name}' takes no parameters", "system", "k" if "k" in r.section("system") else "e")

    lam = r.number("synthesis", "lambda", None, positive=True)
    degree = r.number("synthesis", "degree", 0, integer=True)
    if degree not in (0, 1, 2):
        r.fail(f"'degree' must be 0, 1 or 2, got {degree}", "synthesis", "degree")
    a1 = r.number("synthesis", "a1", 0.1, positive=True)
    a2 = r.number("synthesis", "a2", 10.0, positive=True)
    if a2 < a1:
        r.fail(f"'a2' must be at least a1={a1}", "synthesis", "a2")
    rho_mode = r.string("synthesis", "rho_mode", "free")
    if rho_mode not in ("free", "zero"):
        r.fail(f"'rho_mode' must be \"free\" or \"zero\", got {rho_mode!r}", "synthesis", "rho_mode")
    method = r.string("synthesis", "method", "descent")
    if method not in ("descent", "convex"):
        r.fail(f"'method' must be \"descent\" or \"convex\", got {method!r}", "synthesis", "method")
    if method == "convex" and degree != 0:
        r.fail("'method = \"convex\"' needs degree 0", "synthesis", "method")
    synthesis = SynthesisOptions(
        degree=degree,
        grid_size=r.number("synthesis", "grid_size", 200, integer=True, positive=True),
        seed=r.number("synthesis", "seed", 0, integer=True, minimum=0),
        a1=a1,
        a2=a2,
        eps_margin=r.number("synthesis", "eps_margin", 1e-6, positive=True),
        eps_kill=r.number("synthesis", "eps_kill", 1e-8, positive=True),
        max_iters=r.number("synthesis", "max_iters", 500, integer=True, minimum=0),
        rho_mode=rho_mode,
        rho_max=r.number("synthesis", "rho_max", 1e4, positive=True),
        target_margin=r.number("synthesis", "target_margin", 1e-3, positive=True),
        method=method,
        solver=r.string("synthesis", "solver"),
    )

    t_end = r.number("simulation", "t_end", 10.0, positive=True)
    dt = r.number("simulation", "dt", 1e-3, positive=True)
    period_raw = r.section("simulation").get("period", "auto")
    if isinstance(period_raw, str):
        if period_raw != "auto":
            r.fail(f"'period' must be a number or \"auto\", got {period_raw!r}", "simulation", "period")
        period = "auto"
    else:
        period = r.number("simulation", "period", None, positive=True)
        if period <= dt:
            r.fail(f"'period' must exceed dt={dt}", "simulation", "period")
    k_target = r.number("simulation", "k_target", 0.5, positive=True)
    if k_target >= 1.0:
        r.fail(f"'k_target' must lie in (0, 1), got {k_target}", "simulation", "k_target")
    simulation = SimulationConfig(
        t_end=t_end,
        dt=dt,
        period=period,
        path_segments=r.number("simulation", "path_segments", 16, integer=True, positive=True),
        reference=r.string("simulation", "reference", "builtin"),
        x0=r.vector("simulation", "x0"),
        x0_seed=r.number("simulation", "x0_seed", 0, integer=True, minimum=0),
        x0_offset=r.number("simulation", "x0_offset", 0.5, minimum=0.0),
        x_star0=r.vector("simulation", "x_star0"),
        u_star=r.vector("simulation", "u_star"),
        K=r.number("simulation", "K", 1.0, minimum=1.0),
        k_target=k_target,
    )
    if dt >= t_end:
        r.fail(f"'dt' must be smaller than t_end={t_end}", "simulation", "dt")

    def out(key):
        value = r.string("output", key)
        return None if value is None else (Path(value) if Path(value).is_absolute() else path.parent / value)

    output = OutputConfig(**{key: out(key) for key in _SECTIONS["output"]})
    return RunConfig(
        path=path,
        system_name=name,
        system_params=params,
        lam=lam,
        synthesis=synthesis,
        simulation=simulation,
        output=output,
        header_lines=headers,
        key_lines=keys,
    )
