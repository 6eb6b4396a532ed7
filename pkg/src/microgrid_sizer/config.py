"""Scenario configuration files (TOML).

Every section and key is optional except ``[traces]``; absent keys take the
defaults below, unknown keys are rejected. Trace paths are resolved relative to
the config file. Example::

    [traces]
    load = "load.csv"                      # column load_kw
    weather = "weather.csv"                # columns poa_w_m2, temp_c, wind_ms
    carbon_intensity = "carbon_intensity.csv"  # column gco2_per_kwh
    wind_ref_height_m = 10.0

    [simulation]
    step_s = 3600          # start/end (ISO-8601 with offset) default to the trace overlap
    grid_charging = false

    [search]
    seed = 42
"""

from __future__ import annotations

import dataclasses
import hashlib
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .candidates import DEFAULT_BUDGETS
from .carbon import DEFAULT_HORIZON_DAYS, EmbodiedFactors
from .exceptions import ConfigError, TraceError
from .generation import SolarPlant, WindFarm
from .optimize import OBJECTIVES, ParameterSpace, SearchConfig
from .simulate import Scenario
from .storage import BatteryUnit
from .timeseries import Unit, WeatherFrame, load_csv, parse_timestamp
from .validation import check_config_value


def _num(default, lo=None, hi=None, lo_open=False, hi_open=False, integer=False):
    return field(default=default, metadata={"range": (lo, hi, lo_open, hi_open), "int": integer})


@dataclass
class TracesSection:
    load: str = ""
    weather: str = ""
    carbon_intensity: str = ""
    wind_ref_height_m: float = _num(10.0, lo=0, lo_open=True)


@dataclass
class SimulationSection:
    start: str | None = None
    end: str | None = None
    step_s: float = _num(3600.0, lo=0, lo_open=True)
    grid_charging: bool = False


@dataclass
class SolarSection:
    unit_kw: float = _num(4000.0, lo=0)
    losses: float = _num(0.14, lo=0, hi=1, hi_open=True)
    inverter_efficiency: float = _num(0.96, lo=0, hi=1, lo_open=True)
    temp_coefficient: float = _num(-0.0047, lo=-1, hi=1)
    noct: float = _num(45.0, lo=20, hi=100)


@dataclass
class WindSection:
    turbine_kw: float = _num(3000.0, lo=0, lo_open=True)
    cut_in: float = _num(3.0, lo=0, lo_open=True)
    rated_speed: float = _num(12.0, lo=0, lo_open=True)
    cut_out: float = _num(25.0, lo=0, lo_open=True)
    hub_height: float = _num(100.0, lo=0, lo_open=True)
    shear_exponent: float = _num(0.14, lo=0, hi=1)


@dataclass
class BatterySection:
    unit_kwh: float = _num(7500.0, lo=0)
    c_rate: float = _num(0.5, lo=0)
    min_soc: float = _num(0.1, lo=0, hi=1, hi_open=True)
    max_soc: float = _num(0.9, lo=0, hi=1, lo_open=True)
    charge_efficiency: float = _num(0.95, lo=0, hi=1, lo_open=True)
    discharge_efficiency: float = _num(0.95, lo=0, hi=1, lo_open=True)
    initial_soc: float | None = _num(None, lo=0, hi=1)
    taper_knee_soc: float | None = _num(None, lo=0, hi=1)


@dataclass
class EmbodiedSection:
    solar_tco2_per_unit: float = _num(2520.0, lo=0)
    wind_tco2_per_turbine: float = _num(1046.0, lo=0)
    battery_tco2_per_unit: float = _num(465.0, lo=0)


@dataclass
class SpaceSection:
    wind: list[int] = field(default_factory=lambda: [0, 10])
    solar: list[int] = field(default_factory=lambda: [0, 10])
    battery: list[int] = field(default_factory=lambda: [0, 8])


@dataclass
class SearchSection:
    population_size: int = _num(50, lo=2, integer=True)
    max_evaluations: int = _num(350, lo=2, integer=True)
    crossover_prob: float = _num(0.9, lo=0, hi=1)
    mutation_prob: float = _num(1.0 / 3.0, lo=0, hi=1)
    seed: int = _num(42, lo=0, integer=True)
    objectives: list[str] = field(default_factory=lambda: ["embodied", "operational"])
    mutation: str = "creep"


@dataclass
class CandidatesSection:
    method: str = "threshold"
    budgets: list[float] = field(default_factory=lambda: list(DEFAULT_BUDGETS))
    k: int = _num(5, lo=1, integer=True)
    seed: int = _num(0, lo=0, integer=True)


@dataclass
class ProjectionSection:
    horizon_days: int = _num(DEFAULT_HORIZON_DAYS, lo=0, integer=True)


SECTIONS = {
    "traces": TracesSection,
    "simulation": SimulationSection,
    "solar": SolarSection,
    "wind": WindSection,
    "battery": BatterySection,
    "embodied_factors": EmbodiedSection,
    "space": SpaceSection,
    "search": SearchSection,
    "candidates": CandidatesSection,
    "projection": ProjectionSection,
}
CANDIDATE_METHODS = ("threshold", "greedy", "kmeans")


@dataclass
class ScenarioConfig:
    traces: TracesSection = field(default_factory=TracesSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    solar: SolarSection = field(default_factory=SolarSection)
    wind: WindSection = field(default_factory=WindSection)
    battery: BatterySection = field(default_factory=BatterySection)
    embodied_factors: EmbodiedSection = field(default_factory=EmbodiedSection)
    space: SpaceSection = field(default_factory=SpaceSection)
    search: SearchSection = field(default_factory=SearchSection)
    candidates: CandidatesSection = field(default_factory=CandidatesSection)
    projection: ProjectionSection = field(default_factory=ProjectionSection)
    base_dir: Path = field(default=Path("."), compare=False)

    def trace_path(self, name: str) -> Path:
        return (self.base_dir / getattr(self.traces, name)).resolve()

    def to_dict(self) -> dict:
        """Plain tree of the config sections; ``None`` values are omitted."""
        out = {}
        for name in SECTIONS:
            section = dataclasses.asdict(getattr(self, name))
            out[name] = {k: v for k, v in section.items() if v is not None}
        return out

    def digest(self) -> str:
        return hashlib.sha256(dump_config(self).encode()).hexdigest()

    def parameter_space(self) -> ParameterSpace:
        s = self.space
        return ParameterSpace(tuple(s.wind), tuple(s.solar), tuple(s.battery))

    def search_config(self, seed: int | None = None) -> SearchConfig:
        s = self.search
        return SearchConfig(s.population_size, s.max_evaluations, s.crossover_prob,
                            s.mutation_prob, s.seed if seed is None else seed, tuple(s.objectives),
                            s.mutation)

    def solar_unit(self) -> SolarPlant:
        s = self.solar
        return SolarPlant(s.unit_kw, s.losses, s.inverter_efficiency, s.temp_coefficient, s.noct)

    def turbine(self) -> WindFarm:
        w = self.wind
        return WindFarm(1, w.turbine_kw, w.cut_in, w.rated_speed, w.cut_out, w.hub_height,
                        w.shear_exponent)

    def battery_unit(self) -> BatteryUnit:
        return BatteryUnit(**dataclasses.asdict(self.battery))

    def embodied(self) -> EmbodiedFactors:
        return EmbodiedFactors(**dataclasses.asdict(self.embodied_factors))


def _check_type(value, annotation: str, key: str):
    optional = annotation.endswith("| None")
    base = annotation.replace("| None", "").strip()
    if value is None and optional:
        return value
    if base == "bool":
        ok = isinstance(value, bool)
    elif base == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif base == "float":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif base == "str":
        ok = isinstance(value, str)
    elif base.startswith("list["):
        inner = base[5:-1]
        ok = isinstance(value, list)
        if ok:
            value = [_check_type(v, inner, f"{key}[{i}]") for i, v in enumerate(value)]
    else:  # pragma: no cover - only the annotations above are used
        ok = True
    if not ok:
        raise ConfigError(f"{key}: expected {base}, got {type(value).__name__} {value!r}")
    return value


def _build_section(name: str, raw: Any):
    cls = SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"[{name}] must be a table")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - set(fields))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")
    values = {}
    for key, value in raw.items():
        f = fields[key]
        qualified = f"{name}.{key}"
        value = _check_type(value, f.type, qualified)
        rng = f.metadata.get("range")
        if rng is not None and value is not None:
            lo, hi, lo_open, hi_open = rng
            check_config_value(value, qualified, lo=lo, hi=hi, lo_open=lo_open, hi_open=hi_open)
        values[key] = value
    return cls(**values)


def _validate(cfg: ScenarioConfig, check_files: bool):
    for key in ("load", "weather", "carbon_intensity"):
        if not getattr(cfg.traces, key):
            raise ConfigError(f"traces.{key} is required")
        if check_files and not cfg.trace_path(key).is_file():
            raise ConfigError(f"traces.{key}: file not found: {cfg.trace_path(key)}")
    for key in ("start", "end"):
        value = getattr(cfg.simulation, key)
        if value is not None:
            try:
                parse_timestamp(value)
            except ValueError as exc:
                raise ConfigError(f"simulation.{key}: {exc}") from None
    if cfg.candidates.method not in CANDIDATE_METHODS:
        raise ConfigError(f"candidates.method must be one of {CANDIDATE_METHODS}")
    if cfg.candidates.budgets != sorted(cfg.candidates.budgets):
        raise ConfigError("candidates.budgets must be sorted ascending")
    unknown = [o for o in cfg.search.objectives if o not in OBJECTIVES]
    if unknown:
        raise ConfigError(f"search.objectives: unknown {unknown}; choose from {sorted(OBJECTIVES)}")
    for key in ("wind", "solar", "battery"):
        bounds = getattr(cfg.space, key)
        if len(bounds) != 2:
            raise ConfigError(f"space.{key} must be [low, high]")
    # Cross-field ranges are enforced by the model constructors.
    builders = {
        "space": cfg.parameter_space, "search": cfg.search_config, "solar": cfg.solar_unit,
        "wind": cfg.turbine, "battery": cfg.battery_unit, "embodied_factors": cfg.embodied,
    }
    for name, build in builders.items():
        try:
            build()
        except ValueError as exc:
            raise ConfigError(f"[{name}]: {exc}") from None


def parse_config(text: str, base_dir=".", check_files: bool = True) -> ScenarioConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    unknown = sorted(set(raw) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    if "traces" not in raw:
        raise ConfigError("missing required section [traces]")
    sections = {name: _build_section(name, raw[name]) for name in raw}
    cfg = ScenarioConfig(**sections, base_dir=Path(base_dir))
    _validate(cfg, check_files)
    return cfg


def load_config(path, check_files: bool = True) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        return parse_config(text, base_dir=path.parent, check_files=check_files)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def dump_config(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(cfg.to_dict())


def build_scenario(cfg: ScenarioConfig, step_s: float | None = None) -> Scenario:
    """Load and align the configured traces; raises :class:`TraceError` on bad data."""
    load = load_csv(cfg.trace_path("load"), {"load_kw": Unit.KW})["load_kw"]
    w = load_csv(cfg.trace_path("weather"),
                 {"poa_w_m2": Unit.W_PER_M2, "temp_c": Unit.DEG_C, "wind_ms": Unit.M_PER_S})
    ci = load_csv(cfg.trace_path("carbon_intensity"),
                  {"gco2_per_kwh": Unit.G_PER_KWH})["gco2_per_kwh"]
    weather = WeatherFrame(w["poa_w_m2"], w["temp_c"], w["wind_ms"], cfg.traces.wind_ref_height_m)
    sim = cfg.simulation
    window = None
    if sim.start is not None or sim.end is not None:
        traces = (load, weather.poa_irradiance, ci)
        window = (parse_timestamp(sim.start) if sim.start else max(t.start for t in traces),
                  parse_timestamp(sim.end) if sim.end else min(t.end for t in traces))
    try:
        return Scenario.from_traces(
            load, weather, ci, solar_unit=cfg.solar_unit(), turbine=cfg.turbine(),
            window=window, step_s=step_s or sim.step_s, battery_unit=cfg.battery_unit(),
            factors=cfg.embodied(), grid_charging=sim.grid_charging)
    except TraceError:
        raise
    except ValueError as exc:
        raise TraceError(str(exc)) from None
