"""Seeded synthetic traces for a mid-latitude data-center site.

Produces the three scenario CSVs (``load.csv``, ``weather.csv``,
``carbon_intensity.csv``) with the same columns real ingested traces use. The
load averages about 1.6 MW with a diurnal and weekly pattern; irradiance comes
from solar geometry on a south-facing 30 degree tilt with an AR(1) cloud factor;
wind and carbon intensity are AR(1) processes around seasonal means.

    python -m microgrid_sizer.synthetic OUT_DIR --days 365 --seed 7
"""

from __future__ import annotations

import argparse
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .timeseries import TimeSeries, Unit, WeatherFrame, write_csv

LATITUDE_DEG = 35.0
TILT_DEG = 30.0


def _ar1(rng, n, phi, sigma):
    noise = rng.normal(0.0, sigma, n)
    out = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc = phi * acc + noise[i]
        out[i] = acc
    return out


def _poa_clear_sky(hours: np.ndarray) -> np.ndarray:
    """Plane-of-array clear-sky irradiance (W/m2) at the middle of each hour."""
    doy = hours / 24.0
    decl = np.radians(23.45) * np.sin(2 * np.pi * (284 + doy) / 365.0)
    hour_angle = np.radians(15.0 * ((hours % 24.0) + 0.5 - 12.0))
    lat = np.radians(LATITUDE_DEG)
    tilt_lat = lat - np.radians(TILT_DEG)
    cos_zen = np.sin(lat) * np.sin(decl) + np.cos(lat) * np.cos(decl) * np.cos(hour_angle)
    cos_inc = (np.sin(tilt_lat) * np.sin(decl)
               + np.cos(tilt_lat) * np.cos(decl) * np.cos(hour_angle))
    airmass_loss = np.exp(-0.14 / np.clip(cos_zen, 0.05, None))
    return np.where(cos_zen > 0.0, 1100.0 * np.clip(cos_inc, 0.0, None) * airmass_loss, 0.0)


def generate(days: int = 365, seed: int = 7, start: datetime | None = None):
    """Return ``(load, weather, carbon_intensity)`` hourly series."""
    start = start or datetime(2023, 1, 1, tzinfo=timezone.utc)
    rng = np.random.default_rng(seed)
    n = days * 24
    hours = np.arange(n, dtype=np.float64)
    hod = hours % 24.0
    season = np.cos(2 * np.pi * (hours / 24.0 - 200.0) / 365.0)  # +1 in mid-July

    diurnal = 0.06 * np.sin(2 * np.pi * (hod - 9.0) / 24.0)
    weekly = np.where(((hours // 24) % 7) >= 5, -0.05, 0.0)
    load = 1620.0 * (1.0 + diurnal + weekly + 0.04 * season + _ar1(rng, n, 0.9, 0.02))
    load = np.clip(load, 800.0, None)

    clouds = 1.0 / (1.0 + np.exp(-(0.9 + _ar1(rng, n, 0.97, 0.35))))
    poa = _poa_clear_sky(hours) * np.clip(clouds, 0.05, 1.0)
    temp = 16.0 + 9.0 * season + 4.0 * np.sin(2 * np.pi * (hod - 9.0) / 24.0) + _ar1(rng, n, 0.95, 0.6)

    wind_mean = 5.2 - 0.9 * season + 0.6 * np.cos(2 * np.pi * (hod - 3.0) / 24.0)
    wind = np.clip(wind_mean * np.exp(_ar1(rng, n, 0.96, 0.13) - 0.08), 0.0, None)

    solar_dip = 70.0 * _poa_clear_sky(hours) / 1100.0
    ci = np.clip(390.0 - 40.0 * season - solar_dip + 25.0 * _ar1(rng, n, 0.98, 0.25), 60.0, None)

    step = 3600.0
    weather = WeatherFrame(TimeSeries(start, step, np.round(poa, 3), Unit.W_PER_M2),
                           TimeSeries(start, step, np.round(temp, 3), Unit.DEG_C),
                           TimeSeries(start, step, np.round(wind, 3), Unit.M_PER_S),
                           ref_height=10.0)
    return (TimeSeries(start, step, np.round(load, 3), Unit.KW), weather,
            TimeSeries(start, step, np.round(ci, 3), Unit.G_PER_KWH))


def write_scenario(out_dir, days: int = 365, seed: int = 7):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    load, weather, ci = generate(days, seed)
    write_csv(out / "load.csv", {"load_kw": load})
    write_csv(out / "weather.csv", {"poa_w_m2": weather.poa_irradiance,
                                    "temp_c": weather.ambient_temp,
                                    "wind_ms": weather.wind_speed_ref})
    write_csv(out / "carbon_intensity.csv", {"gco2_per_kwh": ci})
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir")
    parser.add_argument("--days", type=int, default=365)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    write_scenario(args.out_dir, args.days, args.seed)


if __name__ == "__main__":
    main()
