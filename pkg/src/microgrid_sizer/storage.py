"""Linear-efficiency battery with capacity bounds and charge/discharge rate limits.

Sign convention: positive power charges the battery, negative discharges it.
Powers are external (grid/bus side) kW; ``stored_kwh`` is internal energy, so
charging stores ``p * dt * charge_efficiency`` and discharging removes
``|p| * dt / discharge_efficiency``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .validation import check_scalar


@dataclass(frozen=True)
class BatteryParams:
    capacity_kwh: float
    max_charge_kw: float
    max_discharge_kw: float
    min_soc: float = 0.1
    max_soc: float = 0.9
    charge_efficiency: float = 0.95
    discharge_efficiency: float = 0.95
    initial_soc: float | None = None
    taper_knee_soc: float | None = None
    """Above this SoC the charge limit falls linearly to zero at ``max_soc``; ``None`` disables it."""

    def __post_init__(self):
        check_scalar(self.capacity_kwh, "capacity_kwh", lo=0)
        check_scalar(self.max_charge_kw, "max_charge_kw", lo=0)
        check_scalar(self.max_discharge_kw, "max_discharge_kw", lo=0)
        check_scalar(self.min_soc, "min_soc", lo=0, hi=1, hi_open=True)
        check_scalar(self.max_soc, "max_soc", lo=self.min_soc, hi=1, lo_open=True)
        check_scalar(self.charge_efficiency, "charge_efficiency", lo=0, hi=1, lo_open=True)
        check_scalar(self.discharge_efficiency, "discharge_efficiency", lo=0, hi=1, lo_open=True)
        if self.initial_soc is not None:
            check_scalar(self.initial_soc, "initial_soc", lo=self.min_soc, hi=self.max_soc)
        if self.taper_knee_soc is not None:
            check_scalar(self.taper_knee_soc, "taper_knee_soc", lo=self.min_soc, hi=self.max_soc,
                         hi_open=True)

    @classmethod
    def from_units(cls, units: int, unit_kwh: float = 7500.0, c_rate: float = 0.5, **kwargs):
        """Scale a per-unit description (default: 7.5 MWh at 0.5 C) to ``units`` units."""
        capacity = units * unit_kwh
        return cls(capacity_kwh=capacity, max_charge_kw=capacity * c_rate,
                   max_discharge_kw=capacity * c_rate, **kwargs)

    @property
    def floor_kwh(self) -> float:
        return self.capacity_kwh * self.min_soc

    @property
    def ceiling_kwh(self) -> float:
        return self.capacity_kwh * self.max_soc

    @property
    def usable_kwh(self) -> float:
        return self.capacity_kwh * (self.max_soc - self.min_soc)

    @property
    def knee_kwh(self) -> float | None:
        if self.taper_knee_soc is None:
            return None
        return self.capacity_kwh * self.taper_knee_soc

    def kernel_args(self) -> tuple:
        """Constants consumed by :func:`step_stored`, in its positional order."""
        return (self.floor_kwh, self.ceiling_kwh, self.charge_efficiency,
                self.discharge_efficiency, self.max_charge_kw, self.max_discharge_kw,
                self.knee_kwh)


@dataclass(frozen=True)
class BatteryState:
    stored_kwh: float
    cumulative_discharge_kwh: float = 0.0
    cumulative_charge_kwh: float = 0.0

    @classmethod
    def initial(cls, params: BatteryParams) -> "BatteryState":
        soc = params.min_soc if params.initial_soc is None else params.initial_soc
        return cls(stored_kwh=params.capacity_kwh * soc)


def step_stored(stored, requested_kw, dt_h, floor, ceiling, eta_c, eta_d, max_c, max_d, knee):
    """Scalar battery transition: returns ``(new_stored_kwh, actual_kw)``.

    When a request hits the energy bound the result lands exactly on the bound,
    and re-issuing the returned power from the same state is a fixed point.
    """
    if requested_kw > 0.0:
        limit = max_c
        if knee is not None and stored > knee:
            limit = max_c * (ceiling - stored) / (ceiling - knee)
        headroom = ceiling - stored
        if headroom <= 0.0 or limit <= 0.0:
            return stored, 0.0
        p = requested_kw if requested_kw < limit else limit
        p_full = headroom / (dt_h * eta_c)
        if p >= p_full:
            return ceiling, p_full
        return stored + p * dt_h * eta_c, p
    if requested_kw < 0.0:
        available = stored - floor
        if available <= 0.0 or max_d <= 0.0:
            return stored, 0.0
        p = -requested_kw if -requested_kw < max_d else max_d
        p_empty = available * eta_d / dt_h
        if p >= p_empty:
            return floor, -p_empty
        return stored - p * dt_h / eta_d, -p
    return stored, 0.0


def battery_step(params: BatteryParams, state: BatteryState, requested_kw: float,
                 dt: float) -> tuple[BatteryState, float]:
    """Advance the battery by ``dt`` seconds under a signed power request.

    Requests are clamped to the rate limits and the SoC window, never rejected.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0 seconds, got {dt!r}")
    dt_h = dt / 3600.0
    stored, actual = step_stored(state.stored_kwh, requested_kw, dt_h, *params.kernel_args())
    if actual == 0.0 and stored == state.stored_kwh:
        return state, 0.0
    moved = abs(actual) * dt_h
    if actual > 0:
        new = replace(state, stored_kwh=stored,
                      cumulative_charge_kwh=state.cumulative_charge_kwh + moved)
    else:
        new = replace(state, stored_kwh=stored,
                      cumulative_discharge_kwh=state.cumulative_discharge_kwh + moved)
    return new, actual


def equivalent_cycles(params: BatteryParams, state: BatteryState) -> float:
    """Full-equivalent cycles: delivered energy over usable capacity."""
    if params.usable_kwh <= 0:
        raise ValueError("equivalent cycles are undefined for a battery without usable capacity")
    return state.cumulative_discharge_kwh / params.usable_kwh


@dataclass(frozen=True)
class BatteryUnit:
    """Per-unit battery description; a composition scales it by its unit count."""

    unit_kwh: float = 7500.0
    c_rate: float = 0.5
    min_soc: float = 0.1
    max_soc: float = 0.9
    charge_efficiency: float = 0.95
    discharge_efficiency: float = 0.95
    initial_soc: float | None = None
    taper_knee_soc: float | None = None

    def __post_init__(self):
        check_scalar(self.unit_kwh, "unit_kwh", lo=0)
        check_scalar(self.c_rate, "c_rate", lo=0)
        self.params(1)  # validates the remaining fields

    def params(self, units: int) -> BatteryParams:
        return BatteryParams.from_units(
            units, unit_kwh=self.unit_kwh, c_rate=self.c_rate, min_soc=self.min_soc,
            max_soc=self.max_soc, charge_efficiency=self.charge_efficiency,
            discharge_efficiency=self.discharge_efficiency, initial_soc=self.initial_soc,
            taper_knee_soc=self.taper_knee_soc)
