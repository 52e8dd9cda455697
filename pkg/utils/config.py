# utils/config.py
"""Scenario configuration: one TOML file with flat sections.

    [scenario]    example = "oscillator" | "soliton", threads, seed
    [oscillator]  c_re, c_im
    [soliton]     a, b
    [potential]   x_min, x_max, n_points
    [lattice]     x, y, t (lists)
    [methods]     propagator, evolve (lists of method names), spectral_terms
    [quadrature]  truncation_radius, abs_tol, rel_tol, max_subdivisions
    [evolution]   x_min, x_max, spacing, t, dt, cn_refine, boundary_cap
    [packet]      kind = "gaussian" | "bound_state", center, width, momentum
    [output]      potential, propagator, evolve, evolve_summary, report
    [verify]      pattern, tolerances = { check_name = value }
"""

import dataclasses
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

from models.quadrature import QuadratureSpec
from utils.errors import ConfigError

EXAMPLES = ("oscillator", "soliton")
KERNEL_METHODS = ("TheoremQuad", "ClosedForm", "SpectralSum")
EVOLVE_METHODS = KERNEL_METHODS + ("OracleCN",)
PACKET_KINDS = ("gaussian", "bound_state")


@dataclass(frozen=True)
class OscillatorParams:
    c_re: float = 0.0
    c_im: float = 2.0

    @property
    def C(self) -> complex:
        return complex(self.c_re, self.c_im)


@dataclass(frozen=True)
class SolitonParams:
    a: float = 1.0
    b: float = 2.0


@dataclass(frozen=True)
class PotentialGrid:
    x_min: float = -12.0
    x_max: float = 12.0
    n_points: int = 241


@dataclass(frozen=True)
class LatticeConfig:
    x: Tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0)
    y: Tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0)
    t: Tuple[float, ...] = (0.7,)


@dataclass(frozen=True)
class MethodsConfig:
    propagator: Tuple[str, ...] = ("TheoremQuad", "ClosedForm")
    evolve: Tuple[str, ...] = EVOLVE_METHODS
    spectral_terms: int = 64


@dataclass(frozen=True)
class EvolutionSettings:
    x_min: float = -14.0
    x_max: float = 14.0
    spacing: float = 0.1
    t: float = 0.7
    dt: float = 1e-3
    cn_refine: int = 4
    boundary_cap: float = 1e-6


@dataclass(frozen=True)
class PacketConfig:
    kind: str = "gaussian"
    center: float = 1.0
    width: float = 1.0
    momentum: float = 0.0


@dataclass(frozen=True)
class OutputConfig:
    potential: str = "out/potential.csv"
    propagator: str = "out/propagator.csv"
    evolve: str = "out/evolve.csv"
    evolve_summary: str = "out/evolve_summary.json"
    report: str = "out/verify_report.json"


@dataclass(frozen=True)
class VerifyConfig:
    pattern: str = "*"
    tolerances: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioConfig:
    example: str = "oscillator"
    threads: int = 1
    seed: int = 20240101
    oscillator: OscillatorParams = field(default_factory=OscillatorParams)
    soliton: SolitonParams = field(default_factory=SolitonParams)
    potential: PotentialGrid = field(default_factory=PotentialGrid)
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    methods: MethodsConfig = field(default_factory=MethodsConfig)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    evolution: EvolutionSettings = field(default_factory=EvolutionSettings)
    packet: PacketConfig = field(default_factory=PacketConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


_SECTIONS = {
    "oscillator": OscillatorParams,
    "soliton": SolitonParams,
    "potential": PotentialGrid,
    "lattice": LatticeConfig,
    "methods": MethodsConfig,
    "quadrature": QuadratureSpec,
    "evolution": EvolutionSettings,
    "packet": PacketConfig,
    "output": OutputConfig,
    "verify": VerifyConfig,
}
_SCENARIO_KEYS = ("example", "threads", "seed")


def _coerce(section: str, key: str, value, default):
    name = f"{section}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError("expected true or false", field=name)
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError("expected a list", field=name)
        if default and isinstance(default[0], str):
            if not all(isinstance(item, str) for item in value):
                raise ConfigError("expected a list of strings", field=name)
            return tuple(value)
        if not all(isinstance(item, (int, float)) and not isinstance(item, bool) for item in value):
            raise ConfigError("expected a list of numbers", field=name)
        return tuple(float(item) for item in value)
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError("expected a table", field=name)
        try:
            return {str(k): float(v) for k, v in value.items()}
        except (TypeError, ValueError):
            raise ConfigError("expected numeric values", field=name) from None
    if isinstance(default, int):
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError("expected an integer", field=name)
        return value
    if isinstance(default, float) or (default is None and key == "truncation_radius"):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError("expected a number", field=name)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError("expected a string", field=name)
        return value
    raise ConfigError("unsupported value", field=name)


def _build_section(section: str, table: Mapping[str, Any]):
    cls = _SECTIONS[section]
    if not isinstance(table, dict):
        raise ConfigError("expected a table", field=section)
    defaults = {f.name: (f.default if f.default is not dataclasses.MISSING else f.default_factory())
                for f in dataclasses.fields(cls)}
    values = {}
    for key, value in table.items():
        if key not in defaults:
            raise ConfigError("unknown key", field=f"{section}.{key}")
        values[key] = _coerce(section, key, value, defaults[key])
    try:
        return cls(**values)
    except ValueError as exc:
        raise ConfigError(str(exc), field=section) from None


def _validate(cfg: ScenarioConfig) -> None:
    if cfg.example not in EXAMPLES:
        raise ConfigError(f"example must be one of {EXAMPLES}", field="scenario.example")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1", field="scenario.threads")
    for name in cfg.methods.propagator:
        if name not in KERNEL_METHODS:
            raise ConfigError(f"unknown method {name!r}", field="methods.propagator")
    for name in cfg.methods.evolve:
        if name not in EVOLVE_METHODS:
            raise ConfigError(f"unknown method {name!r}", field="methods.evolve")
    if cfg.methods.spectral_terms < 1:
        raise ConfigError("spectral_terms must be >= 1", field="methods.spectral_terms")
    if cfg.packet.kind not in PACKET_KINDS:
        raise ConfigError(f"kind must be one of {PACKET_KINDS}", field="packet.kind")
    if not cfg.packet.width > 0:
        raise ConfigError("width must be > 0", field="packet.width")
    evolution = cfg.evolution
    if not (evolution.x_min < evolution.x_max and evolution.spacing > 0 and evolution.dt > 0):
        raise ConfigError("need x_min < x_max, spacing > 0 and dt > 0", field="evolution")
    if not evolution.t > 0 or evolution.cn_refine < 1:
        raise ConfigError("need t > 0 and cn_refine >= 1", field="evolution")
    if cfg.potential.n_points < 3 or not cfg.potential.x_min < cfg.potential.x_max:
        raise ConfigError("need x_min < x_max and n_points >= 3", field="potential")
    if not all(len(axis) for axis in (cfg.lattice.x, cfg.lattice.y, cfg.lattice.t)):
        raise ConfigError("lattice axes must be non-empty", field="lattice")


def parse_config(document: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed TOML document plus CLI overrides."""
    sections = {}
    scenario = {}
    for name, table in document.items():
        if name == "scenario":
            if not isinstance(table, dict):
                raise ConfigError("expected a table", field="scenario")
            for key, value in table.items():
                if key not in _SCENARIO_KEYS:
                    raise ConfigError("unknown key", field=f"scenario.{key}")
                default = getattr(ScenarioConfig, key)
                scenario[key] = _coerce("scenario", key, value, default)
        elif name in _SECTIONS:
            sections[name] = _build_section(name, table)
        else:
            raise ConfigError("unknown section", field=name)

    cfg = ScenarioConfig(**scenario, **sections)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if overrides:
        top = {k: overrides[k] for k in ("threads", "seed") if k in overrides}
        if "pattern" in overrides:
            top["verify"] = dataclasses.replace(cfg.verify, pattern=overrides["pattern"])
        cfg = dataclasses.replace(cfg, **top)
    _validate(cfg)
    return cfg


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> ScenarioConfig:
    if path is None:
        return parse_config({}, overrides)
    try:
        with open(path, "rb") as handle:
            document = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"malformed TOML in {path}: {exc}", line=int(match.group(1)) if match else None) from None
    return parse_config(document, overrides)
