"""Uniformly sampled traces: CSV ingestion, resampling and alignment.

A value at index ``i`` is the average over ``[start + i*step, start + (i+1)*step)``,
so energy over a sample is ``value * step`` and mean-downsampling conserves it.
Timestamps are held as timezone-aware UTC datetimes.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .exceptions import TraceError


class Unit(str, enum.Enum):
    KW = "kW"
    W_PER_M2 = "W/m2"
    DEG_C = "degC"
    M_PER_S = "m/s"
    G_PER_KWH = "gCO2/kWh"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"w/m²": cls.W_PER_M2, "°c": cls.DEG_C, "c": cls.DEG_C,
                   "gco₂/kwh": cls.G_PER_KWH, "g/kwh": cls.G_PER_KWH}
        for unit in cls:
            if unit.value.lower() == str(value).lower():
                return unit
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown unit {value!r}") from None


# Temperatures in degC are the only quantity here that may legitimately go negative.
_SIGNED_UNITS = {Unit.DEG_C}


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp with an explicit UTC offset and return it in UTC."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Immutable uniformly sampled series.

    ``step`` is in seconds. ``values`` is stored as a read-only float64 array.
    """

    start: datetime
    step: float
    values: np.ndarray
    unit: Unit

    def __post_init__(self):
        if self.start.tzinfo is None:
            raise TraceError("TimeSeries.start must be timezone-aware")
        object.__setattr__(self, "start", self.start.astimezone(timezone.utc))
        if not (isinstance(self.step, (int, float)) and math.isfinite(self.step) and self.step > 0):
            raise TraceError(f"step must be a positive number of seconds, got {self.step!r}")
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "unit", Unit.parse(self.unit))
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise TraceError("TimeSeries needs a non-empty one-dimensional value sequence")
        bad = ~np.isfinite(values)
        if bad.any():
            raise TraceError(f"non-finite value at index {int(np.argmax(bad))}")
        if self.unit not in _SIGNED_UNITS and (values < 0).any():
            raise TraceError(
                f"negative {self.unit.value} value at index {int(np.argmax(values < 0))}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self.start == other.start and self.step == other.step
                and self.unit == other.unit and np.array_equal(self.values, other.values))

    @property
    def end(self) -> datetime:
        """Exclusive end of the covered interval."""
        return self.start + timedelta(seconds=self.step * len(self))

    @property
    def duration(self) -> float:
        return self.step * len(self)

    def timestamps(self) -> list[datetime]:
        return [self.start + timedelta(seconds=self.step * i) for i in range(len(self))]

    def with_values(self, values, unit=None) -> "TimeSeries":
        return TimeSeries(self.start, self.step, values, unit or self.unit)


@dataclass(frozen=True, eq=False)
class WeatherFrame:
    poa_irradiance: TimeSeries
    ambient_temp: TimeSeries
    wind_speed_ref: TimeSeries
    ref_height: float = 10.0

    def __post_init__(self):
        series = (self.poa_irradiance, self.ambient_temp, self.wind_speed_ref)
        grids = {(s.start, s.step, len(s)) for s in series}
        if len(grids) != 1:
            raise TraceError("weather series must share start, step and length")
        if not self.ref_height > 0:
            raise TraceError(f"ref_height must be > 0, got {self.ref_height!r}")
        if self.poa_irradiance.unit is not Unit.W_PER_M2:
            raise TraceError("poa_irradiance must be in W/m2")
        if self.ambient_temp.unit is not Unit.DEG_C:
            raise TraceError("ambient_temp must be in degC")
        if self.wind_speed_ref.unit is not Unit.M_PER_S:
            raise TraceError("wind_speed_ref must be in m/s")


def _data_rows(path: Path):
    with open(path, newline="") as fh:
        for line in csv.reader(row for row in fh if not row.lstrip().startswith("#")):
            if line and any(cell.strip() for cell in line):
                yield line


def load_csv(path, column_spec: Mapping[str, "Unit | str"]) -> dict[str, TimeSeries]:
    """Read the requested columns of a trace CSV.

    The first column must be ``timestamp``. Row numbers in error messages are
    1-based and count data rows only (header and comments excluded).
    """
    path = Path(path)
    if not path.is_file():
        raise TraceError(f"{path}: file not found")
    rows = _data_rows(path)
    try:
        header = [h.strip() for h in next(rows)]
    except StopIteration:
        raise TraceError(f"{path}: empty file") from None
    if not header or header[0] != "timestamp":
        raise TraceError(f"{path}: first column must be 'timestamp', got {header[:1]}")
    missing = [name for name in column_spec if name not in header]
    if missing:
        raise TraceError(f"{path}: missing column(s) {', '.join(missing)}")
    idx = {name: header.index(name) for name in column_spec}

    times: list[datetime] = []
    columns: dict[str, list[float]] = {name: [] for name in column_spec}
    step = None
    for row_no, row in enumerate(rows, start=1):
        try:
            ts = parse_timestamp(row[0])
        except (ValueError, IndexError) as exc:
            raise TraceError(f"{path}: bad timestamp at row {row_no}: {exc}") from None
        if times:
            delta = (ts - times[-1]).total_seconds()
            if step is None:
                if delta <= 0:
                    raise TraceError(f"{path}: timestamps not strictly increasing at row {row_no}")
                step = delta
            elif delta != step:
                raise TraceError(f"{path}: non-uniform spacing at row {row_no}")
        times.append(ts)
        for name, col in idx.items():
            try:
                value = float(row[col])
            except (ValueError, IndexError):
                raise TraceError(f"{path}: unparsable value in column {name!r} at row {row_no}") from None
            if not math.isfinite(value):
                raise TraceError(f"{path}: non-finite value in column {name!r} at row {row_no}")
            columns[name].append(value)
    if not times:
        raise TraceError(f"{path}: empty file (no data rows)")
    if step is None:
        raise TraceError(f"{path}: need at least two rows to infer the sampling step")

    out = {}
    for name, unit in column_spec.items():
        try:
            out[name] = TimeSeries(times[0], step, columns[name], Unit.parse(unit))
        except TraceError as exc:
            raise TraceError(f"{path}: column {name!r}: {exc}") from None
    return out


def write_csv(path, series: Mapping[str, TimeSeries]):
    """Write series sharing one grid to CSV; floats use ``repr`` so reloading is exact."""
    items = list(series.items())
    if not items:
        raise TraceError("nothing to write")
    first = items[0][1]
    for name, ts in items[1:]:
        if (ts.start, ts.step, len(ts)) != (first.start, first.step, len(first)):
            raise TraceError(f"series {name!r} is not on the same grid as {items[0][0]!r}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", *(name for name, _ in items)])
        for i, ts in enumerate(first.timestamps()):
            writer.writerow([format_timestamp(ts), *(repr(float(s.values[i])) for _, s in items)])


def _ratio(a: float, b: float) -> int | None:
    k = round(a / b)
    return k if k >= 1 and math.isclose(k * b, a, rel_tol=0, abs_tol=1e-9) else None


def resample(ts: TimeSeries, new_step: float, method: str = "auto") -> TimeSeries:
    """Change the sampling step of ``ts``.

    ``method`` is ``"mean"`` (downsample: average whole buckets, trailing partial
    bucket dropped), ``"hold"`` (upsample: repeat each value) or ``"auto"``.
    """
    new_step = float(new_step)
    if new_step == ts.step:
        return ts
    if method == "auto":
        method = "mean" if new_step > ts.step else "hold"
    if method in ("mean", "mean-downsample"):
        k = _ratio(new_step, ts.step)
        if k is None:
            raise TraceError(f"new step {new_step}s is not an integer multiple of {ts.step}s")
        n = len(ts) // k
        if n == 0:
            raise TraceError(f"series of {len(ts)} samples is shorter than one {new_step}s bucket")
        values = ts.values[: n * k].reshape(n, k).mean(axis=1)
    elif method in ("hold", "hold-upsample"):
        k = _ratio(ts.step, new_step)
        if k is None:
            raise TraceError(f"step {ts.step}s is not an integer multiple of new step {new_step}s")
        values = np.repeat(ts.values, k)
    else:
        raise ValueError(f"unknown resampling method {method!r}")
    return TimeSeries(ts.start, new_step, values, ts.unit)


def align(series_set: Sequence[TimeSeries], window: tuple[datetime, datetime],
          step: float | None = None, names: Sequence[str] | None = None) -> list[TimeSeries]:
    """Resample every series to ``step`` and slice it to ``[start, end)``.

    ``step`` defaults to the coarsest step in the set. ``names`` only label
    error messages.
    """
    if not series_set:
        return []
    names = list(names) if names is not None else [f"series[{i}]" for i in range(len(series_set))]
    start, end = (w.astimezone(timezone.utc) for w in window)
    if end <= start:
        raise TraceError(f"empty window [{start}, {end})")
    step = float(step) if step is not None else max(s.step for s in series_set)
    span = (end - start).total_seconds()
    n = _ratio(span, step)
    if n is None:
        raise TraceError(f"window length {span}s is not a whole number of {step}s steps")

    out = []
    for name, ts in zip(names, series_set):
        rs = resample(ts, step)
        lead = (start - rs.start).total_seconds()
        tail = (rs.end - end).total_seconds()
        if lead < 0 or tail < 0:
            short = []
            if lead < 0:
                short.append(f"starts {-lead:g}s after window start")
            if tail < 0:
                short.append(f"ends {-tail:g}s before window end")
            raise TraceError(f"{name} has insufficient coverage: {' and '.join(short)}")
        offset = _ratio(lead, step) if lead > 0 else 0
        if offset is None:
            raise TraceError(f"{name}: window start is not on the series' {step}s grid")
        out.append(TimeSeries(start, step, rs.values[offset: offset + n], rs.unit))
    return out
