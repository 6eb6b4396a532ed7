"""On-site generation models: a PVWatts-style solar plant and a cubic-curve wind farm.

All functions accept scalars or numpy arrays and broadcast; scalar inputs give
float outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_int, check_scalar


def _out(result, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(result)
    return result


@dataclass(frozen=True)
class SolarPlant:
    rated_dc_kw: float
    system_loss_fraction: float = 0.14
    inverter_efficiency: float = 0.96
    temp_coefficient: float = -0.0047  # 1/degC
    noct: float = 45.0  # degC

    def __post_init__(self):
        check_scalar(self.rated_dc_kw, "rated_dc_kw", lo=0)
        check_scalar(self.system_loss_fraction, "system_loss_fraction", lo=0, hi=1, hi_open=True)
        check_scalar(self.inverter_efficiency, "inverter_efficiency", lo=0, hi=1, lo_open=True)
        check_scalar(self.temp_coefficient, "temp_coefficient")
        check_scalar(self.noct, "noct")


@dataclass(frozen=True)
class WindFarm:
    turbine_count: int = 0
    turbine_rated_kw: float = 3000.0
    cut_in: float = 3.0
    rated_speed: float = 12.0
    cut_out: float = 25.0
    hub_height: float = 100.0
    shear_exponent: float = 0.14

    def __post_init__(self):
        check_int(self.turbine_count, "turbine_count", lo=0)
        check_scalar(self.turbine_rated_kw, "turbine_rated_kw", lo=0, lo_open=True)
        check_scalar(self.hub_height, "hub_height", lo=0, lo_open=True)
        check_scalar(self.shear_exponent, "shear_exponent")
        if not 0 < self.cut_in < self.rated_speed < self.cut_out:
            raise ValueError(
                f"need 0 < cut_in < rated_speed < cut_out, got "
                f"{self.cut_in}, {self.rated_speed}, {self.cut_out}")


def cell_temperature(ambient_temp, poa, noct=45.0):
    """NOCT cell temperature estimate: ambient + poa * (noct - 20) / 800."""
    ambient_temp = np.asarray(ambient_temp, dtype=np.float64)
    poa = np.asarray(poa, dtype=np.float64)
    return _out(ambient_temp + poa * (noct - 20.0) / 800.0, ambient_temp, poa)


def solar_power(plant: SolarPlant, poa, ambient_temp):
    """AC output in kW; never negative and never above ``rated_dc_kw * inverter_efficiency``."""
    poa_a = np.asarray(poa, dtype=np.float64)
    t_cell = np.asarray(cell_temperature(ambient_temp, poa_a, plant.noct))
    dc = (plant.rated_dc_kw * (poa_a / 1000.0)
          * (1.0 + plant.temp_coefficient * (t_cell - 25.0))
          * (1.0 - plant.system_loss_fraction))
    ac = np.clip(dc * plant.inverter_efficiency, 0.0, plant.rated_dc_kw * plant.inverter_efficiency)
    return _out(ac, poa, ambient_temp)


def wind_speed_at_hub(v_ref, ref_height, hub_height, shear_exponent=0.14):
    """Power-law shear extrapolation from measurement height to hub height."""
    v_ref_a = np.asarray(v_ref, dtype=np.float64)
    return _out(v_ref_a * (hub_height / ref_height) ** shear_exponent, v_ref)


def turbine_power(farm: WindFarm, v_hub):
    """Single-turbine output in kW from a cubic ramp between cut-in and rated speed."""
    v = np.asarray(v_hub, dtype=np.float64)
    ci3, vr3 = farm.cut_in ** 3, farm.rated_speed ** 3
    ramp = farm.turbine_rated_kw * (v ** 3 - ci3) / (vr3 - ci3)
    power = np.where(v < farm.cut_in, 0.0,
                     np.where(v < farm.rated_speed, ramp,
                              np.where(v < farm.cut_out, farm.turbine_rated_kw, 0.0)))
    return _out(power, v_hub)


def farm_power(farm: WindFarm, v_ref, ref_height):
    v_hub = wind_speed_at_hub(v_ref, ref_height, farm.hub_height, farm.shear_exponent)
    return _out(farm.turbine_count * np.asarray(turbine_power(farm, v_hub)), v_ref)
