"""Embodied and operational carbon accounting and cumulative projections.

Embodied emissions are a one-time charge at acquisition (no amortization).
Operational emissions come from grid imports weighted by average carbon
intensity and are reported as a daily rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .timeseries import TimeSeries, Unit
from .validation import check_scalar

SECONDS_PER_DAY = 86400.0
DEFAULT_HORIZON_DAYS = 20 * 365


@dataclass(frozen=True)
class EmbodiedFactors:
    """Cradle-to-gate tCO2 per component unit.

    Defaults: 630 kgCO2/kW low-carbon PV modules x 4 MW per solar unit, 1046 t per
    3 MW turbine, 62 kgCO2/kWh LFP storage x 7.5 MWh per battery unit.
    """

    solar_tco2_per_unit: float = 2520.0
    wind_tco2_per_turbine: float = 1046.0
    battery_tco2_per_unit: float = 465.0

    def __post_init__(self):
        for name in ("solar_tco2_per_unit", "wind_tco2_per_turbine", "battery_tco2_per_unit"):
            check_scalar(getattr(self, name), name, lo=0)


@dataclass(frozen=True)
class EmissionProfile:
    embodied_tco2: float
    operational_rate_tco2_per_day: float

    def __post_init__(self):
        check_scalar(self.embodied_tco2, "embodied_tco2", lo=0)
        check_scalar(self.operational_rate_tco2_per_day, "operational_rate_tco2_per_day", lo=0)


def embodied(composition, factors: EmbodiedFactors = EmbodiedFactors()) -> float:
    return (composition.wind_turbines * factors.wind_tco2_per_turbine
            + composition.solar_units * factors.solar_tco2_per_unit
            + composition.battery_units * factors.battery_tco2_per_unit)


def operational_from_arrays(import_kw: np.ndarray, ci_g_per_kwh: np.ndarray, step_s: float) -> float:
    """tCO2/day from aligned import power (kW) and carbon intensity (g/kWh) arrays."""
    days = step_s * import_kw.size / SECONDS_PER_DAY
    grams = float(np.dot(import_kw, ci_g_per_kwh)) * (step_s / 3600.0)
    return grams / 1e6 / days


def operational(import_series: TimeSeries, ci_series: TimeSeries) -> float:
    """Average daily operational emissions (tCO2/day) of a grid-import trace."""
    if (import_series.start, import_series.step, len(import_series)) != (
            ci_series.start, ci_series.step, len(ci_series)):
        raise ValueError("import and carbon-intensity series are not aligned")
    if import_series.unit is not Unit.KW or ci_series.unit is not Unit.G_PER_KWH:
        raise ValueError("expected import in kW and carbon intensity in gCO2/kWh")
    return operational_from_arrays(import_series.values, ci_series.values, import_series.step)


def project(profile: EmissionProfile, horizon_days: int = DEFAULT_HORIZON_DAYS) -> np.ndarray:
    """Cumulative tCO2 for day indices ``0..horizon_days`` (inclusive)."""
    if horizon_days < 0:
        raise ValueError("horizon_days must be >= 0")
    days = np.arange(int(horizon_days) + 1, dtype=np.float64)
    return profile.embodied_tco2 + profile.operational_rate_tco2_per_day * days


def cumulative_at(profile: EmissionProfile, days: float) -> float:
    return profile.embodied_tco2 + profile.operational_rate_tco2_per_day * days


def crossover_time(a: EmissionProfile, b: EmissionProfile) -> float | None:
    """Day at which the cumulative totals of ``a`` and ``b`` meet, or ``None`` if never (t >= 0)."""
    rate_gap = a.operational_rate_tco2_per_day - b.operational_rate_tco2_per_day
    if rate_gap == 0:
        return None
    t = (b.embodied_tco2 - a.embodied_tco2) / rate_gap
    return t if t >= 0 else None
