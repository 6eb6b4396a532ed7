"""Discrete-time dispatch of a composition against a year of aligned traces.

Dispatch is greedy with no foresight: on-site generation serves the load; a
surplus charges the battery and the rest is exported; a deficit is drawn from
the battery first and then imported from the grid.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import carbon
from .carbon import EmbodiedFactors
from .generation import SolarPlant, WindFarm, farm_power, solar_power
from .storage import BatteryParams, BatteryState, BatteryUnit, battery_step, step_stored
from .timeseries import TimeSeries, Unit, WeatherFrame, align
from .validation import check_array, check_int


@dataclass(frozen=True, order=True)
class Composition:
    wind_turbines: int = 0
    solar_units: int = 0
    battery_units: int = 0

    def __post_init__(self):
        for name in ("wind_turbines", "solar_units", "battery_units"):
            object.__setattr__(self, name, check_int(getattr(self, name), name, lo=0))

    def __add__(self, other: "Composition") -> "Composition":
        return Composition(self.wind_turbines + other.wind_turbines,
                           self.solar_units + other.solar_units,
                           self.battery_units + other.battery_units)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.wind_turbines, self.solar_units, self.battery_units)

    def __str__(self):
        return f"({self.wind_turbines}, {self.solar_units}, {self.battery_units})"


@dataclass(frozen=True)
class StepResult:
    generation_kw: float
    load_kw: float
    battery_flow_kw: float
    grid_import_kw: float
    grid_export_kw: float


@dataclass(frozen=True)
class SimulationMetrics:
    operational_tco2_per_day: float
    embodied_tco2: float
    coverage_percent: float
    battery_cycles: float | None
    import_kwh: float
    export_kwh: float
    load_kwh: float
    onsite_generation_kwh: float
    battery_charge_kwh: float = 0.0
    battery_discharge_kwh: float = 0.0
    battery_losses_kwh: float = 0.0
    stored_change_kwh: float = 0.0
    days: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Aligned per-unit profiles plus the models needed to price a composition.

    ``solar_unit_kw`` is the AC output of one solar unit and ``wind_turbine_kw``
    that of one turbine, both sampled on the load grid.
    """

    start: datetime
    step_s: float
    load_kw: np.ndarray
    solar_unit_kw: np.ndarray
    wind_turbine_kw: np.ndarray
    ci_g_per_kwh: np.ndarray
    battery_unit: BatteryUnit = field(default_factory=BatteryUnit)
    factors: EmbodiedFactors = field(default_factory=EmbodiedFactors)
    grid_charging: bool = False

    def __post_init__(self):
        n = None
        for name in ("load_kw", "solar_unit_kw", "wind_turbine_kw", "ci_g_per_kwh"):
            arr = check_array(getattr(self, name), name, nonnegative=True)
            if n is not None and arr.size != n:
                raise ValueError(f"{name} has {arr.size} samples, expected {n}")
            n = arr.size
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not self.step_s > 0:
            raise ValueError("step_s must be > 0")

    def __len__(self):
        return self.load_kw.size

    @property
    def days(self) -> float:
        return self.step_s * len(self) / carbon.SECONDS_PER_DAY

    @classmethod
    def from_arrays(cls, load_kw, solar_unit_kw=None, wind_turbine_kw=None, ci_g_per_kwh=None,
                    step_s=3600.0, start=None, **kwargs) -> "Scenario":
        """Convenience constructor; omitted profiles default to zeros (CI: 0 g/kWh)."""
        load = np.asarray(load_kw, dtype=np.float64)
        zeros = np.zeros_like(load)
        return cls(
            start=start or datetime(2023, 1, 1, tzinfo=timezone.utc), step_s=float(step_s),
            load_kw=load,
            solar_unit_kw=zeros if solar_unit_kw is None else solar_unit_kw,
            wind_turbine_kw=zeros if wind_turbine_kw is None else wind_turbine_kw,
            ci_g_per_kwh=zeros if ci_g_per_kwh is None else ci_g_per_kwh,
            **kwargs)

    @classmethod
    def from_traces(cls, load: TimeSeries, weather: WeatherFrame, ci: TimeSeries, *,
                    solar_unit: SolarPlant = SolarPlant(rated_dc_kw=4000.0),
                    turbine: WindFarm = WindFarm(turbine_count=1),
                    window: tuple[datetime, datetime] | None = None, step_s: float | None = None,
                    **kwargs) -> "Scenario":
        """Align the raw traces onto one grid and evaluate the per-unit generation models.

        ``window`` defaults to the overlap of all traces and ``step_s`` to the load step.
        Generation is computed on the weather grid and then resampled, so minutely
        weather feeding an hourly run is averaged as power rather than as irradiance.
        """
        if load.unit is not Unit.KW or ci.unit is not Unit.G_PER_KWH:
            raise ValueError("load must be in kW and carbon intensity in gCO2/kWh")
        solar = weather.poa_irradiance.with_values(
            solar_power(solar_unit, weather.poa_irradiance.values, weather.ambient_temp.values),
            Unit.KW)
        one_turbine = WindFarm(**{**asdict(turbine), "turbine_count": 1})
        wind = weather.wind_speed_ref.with_values(
            farm_power(one_turbine, weather.wind_speed_ref.values, weather.ref_height), Unit.KW)
        traces = [load, solar, wind, ci]
        if window is None:
            window = (max(t.start for t in traces), min(t.end for t in traces))
        step_s = load.step if step_s is None else step_s
        aligned = align(traces, window, step_s, names=["load", "solar", "wind", "carbon_intensity"])
        return cls(start=aligned[0].start, step_s=step_s, load_kw=aligned[0].values,
                   solar_unit_kw=aligned[1].values, wind_turbine_kw=aligned[2].values,
                   ci_g_per_kwh=aligned[3].values, **kwargs)

    def generation_kw(self, composition: Composition) -> np.ndarray:
        return (composition.wind_turbines * self.wind_turbine_kw
                + composition.solar_units * self.solar_unit_kw)

    def battery_params(self, composition: Composition) -> BatteryParams:
        return self.battery_unit.params(composition.battery_units)


def _grid_flows(net, flow):
    """Split the residual ``net - flow`` into (import, export)."""
    residual = net - flow
    if residual >= 0.0:
        return 0.0, residual
    return -residual, 0.0


def dispatch_step(gen_kw: float, load_kw: float, battery_params: BatteryParams,
                  battery_state: BatteryState, dt: float, grid_charging: bool = False):
    """One dispatch interval of ``dt`` seconds; returns ``(StepResult, new_state)``."""
    if gen_kw < 0 or load_kw < 0:
        raise ValueError("generation and load must be non-negative")
    net = gen_kw - load_kw
    if net > 0.0 or (grid_charging and net == 0.0):
        request = battery_params.max_charge_kw if grid_charging else net
    else:
        request = net
    state, flow = battery_step(battery_params, battery_state, request, dt)
    imp, exp = _grid_flows(net, flow)
    return StepResult(gen_kw, load_kw, flow, imp, exp), state


def run_simulation(scenario: Scenario, composition: Composition, return_steps: bool = False):
    """Simulate ``composition`` over the whole scenario and reduce to metrics.

    With ``return_steps`` the per-step arrays (generation, load, battery flow,
    import, export, stored energy at step end) are returned alongside.
    """
    gen = scenario.generation_kw(composition)
    load = scenario.load_kw
    params = scenario.battery_params(composition)
    dt_h = scenario.step_s / 3600.0
    n = len(scenario)
    stored0 = BatteryState.initial(params).stored_kwh

    if params.capacity_kwh == 0:
        net = gen - load
        imports = np.where(net >= 0.0, 0.0, -net)
        exports = np.where(net >= 0.0, net, 0.0)
        flows = np.zeros(n)
        stored_trace = np.full(n, stored0)
        charge_kwh = discharge_kwh = 0.0
        stored = stored0
    else:
        floor, ceiling, eta_c, eta_d, max_c, max_d, knee = params.kernel_args()
        grid_charging = scenario.grid_charging
        imports_l, exports_l, flows_l, stored_l = [], [], [], []
        stored = stored0
        charge_e = discharge_e = 0.0
        for g, l in zip(gen.tolist(), load.tolist()):
            net = g - l
            if net > 0.0 or (grid_charging and net == 0.0):
                stored, flow = step_stored(stored, max_c if grid_charging else net, dt_h,
                                           floor, ceiling, eta_c, eta_d, max_c, max_d, knee)
                charge_e += flow
            elif net < 0.0:
                stored, flow = step_stored(stored, net, dt_h,
                                           floor, ceiling, eta_c, eta_d, max_c, max_d, knee)
                discharge_e -= flow
            else:
                flow = 0.0
            residual = net - flow
            if residual >= 0.0:
                imports_l.append(0.0)
                exports_l.append(residual)
            else:
                imports_l.append(-residual)
                exports_l.append(0.0)
            flows_l.append(flow)
            stored_l.append(stored)
        imports = np.array(imports_l)
        exports = np.array(exports_l)
        flows = np.array(flows_l)
        stored_trace = np.array(stored_l)
        charge_kwh = charge_e * dt_h
        discharge_kwh = discharge_e * dt_h

    load_kwh = float(load.sum()) * dt_h
    import_kwh = float(imports.sum()) * dt_h
    coverage = 100.0 * (1.0 - import_kwh / load_kwh) if load_kwh > 0 else 100.0
    cycles = discharge_kwh / params.usable_kwh if params.usable_kwh > 0 else None
    metrics = SimulationMetrics(
        operational_tco2_per_day=carbon.operational_from_arrays(
            imports, scenario.ci_g_per_kwh, scenario.step_s),
        embodied_tco2=carbon.embodied(composition, scenario.factors),
        coverage_percent=min(100.0, max(0.0, coverage)),
        battery_cycles=cycles,
        import_kwh=import_kwh,
        export_kwh=float(exports.sum()) * dt_h,
        load_kwh=load_kwh,
        onsite_generation_kwh=float(gen.sum()) * dt_h,
        battery_charge_kwh=charge_kwh,
        battery_discharge_kwh=discharge_kwh,
        battery_losses_kwh=(charge_kwh * (1.0 - params.charge_efficiency)
                            + discharge_kwh * (1.0 / params.discharge_efficiency - 1.0)),
        stored_change_kwh=stored - stored0,
        days=scenario.days,
    )
    if not return_steps:
        return metrics
    steps = {"generation_kw": gen, "load_kw": np.asarray(load), "battery_flow_kw": flows,
             "grid_import_kw": imports, "grid_export_kw": exports, "stored_kwh": stored_trace}
    return metrics, steps
