from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from microgrid_sizer.carbon import (EmbodiedFactors, EmissionProfile, crossover_time,
                                    cumulative_at, embodied, operational, project)
from microgrid_sizer.simulate import Composition
from microgrid_sizer.timeseries import TimeSeries, Unit

T0 = datetime(2023, 1, 1, tzinfo=timezone.utc)


@pytest.mark.parametrize("comp, expected", [
    ((0, 0, 0), 0.0), ((4, 0, 1), 4649.0), ((3, 2, 3), 9573.0), ((10, 10, 8), 39380.0),
])
def test_embodied_table_values(comp, expected):
    assert embodied(Composition(*comp)) == expected


@given(st.tuples(*[st.integers(0, 20)] * 3), st.tuples(*[st.integers(0, 20)] * 3))
def test_embodied_is_additive(a, b):
    ca, cb = Composition(*a), Composition(*b)
    assert embodied(ca + cb) == embodied(ca) + embodied(cb)


def test_custom_factors_and_validation():
    f = EmbodiedFactors(1.0, 2.0, 3.0)
    assert embodied(Composition(1, 1, 1), f) == 6.0
    with pytest.raises(ValueError):
        EmbodiedFactors(-1.0)


def _series(values, unit, step=3600.0):
    return TimeSeries(T0, step, values, unit)


def test_operational_zero_import():
    assert operational(_series(np.zeros(24), Unit.KW), _series(np.full(24, 400.0), Unit.G_PER_KWH)) == 0


@pytest.mark.parametrize("days", [1, 3, 7])
def test_operational_constant_rate(days):
    n = 24 * days
    rate = operational(_series(np.full(n, 1000.0), Unit.KW), _series(np.full(n, 400.0), Unit.G_PER_KWH))
    assert rate == pytest.approx(9.6, rel=1e-12)


def test_operational_ten_days():
    n = 240
    imports = np.zeros(n)
    imports[:100] = 1000.0  # 100 MWh in total
    rate = operational(_series(imports, Unit.KW), _series(np.full(n, 400.0), Unit.G_PER_KWH))
    assert rate == pytest.approx(4.0, rel=1e-12)


def test_operational_requires_alignment():
    with pytest.raises(ValueError, match="aligned"):
        operational(_series(np.zeros(24), Unit.KW), _series(np.zeros(23), Unit.G_PER_KWH))


def test_projection():
    line = project(EmissionProfile(100.0, 1.0), 365)
    assert line.size == 366 and line[0] == 100.0 and line[365] == 465.0
    flat = project(EmissionProfile(50.0, 0.0))
    assert np.all(flat == 50.0)
    assert project(EmissionProfile(0.0, 15.54))[7300] == pytest.approx(113442.0, abs=1e-6)


def test_crossovers():
    base = EmissionProfile(0.0, 15.54)
    assert crossover_time(base, base) is None
    t = crossover_time(base, EmissionProfile(39380.0, 0.02))
    assert t == pytest.approx(39380 / 15.52)
    assert t / 365 == pytest.approx(6.95, abs=0.005)
    t = crossover_time(EmissionProfile(0.0, 9.33), EmissionProfile(39380.0, 0.02))
    assert t == pytest.approx(4230, abs=0.5)
    assert t / 365 == pytest.approx(11.6, abs=0.05)


def test_crossover_in_the_past_is_none():
    # b is cheaper up front and runs cleaner, so the lines never meet for t >= 0
    assert crossover_time(EmissionProfile(100.0, 5.0), EmissionProfile(10.0, 1.0)) is None


@given(st.floats(0, 1e5), st.floats(0, 100), st.floats(0, 1e5), st.floats(0, 100))
def test_cumulative_totals_meet_at_crossover(ea, ra, eb, rb):
    a, b = EmissionProfile(ea, ra), EmissionProfile(eb, rb)
    t = crossover_time(a, b)
    if t is not None:
        assert cumulative_at(a, t) == pytest.approx(cumulative_at(b, t), rel=1e-9, abs=1e-6)


@given(st.floats(0, 1e5), st.floats(0, 100), st.floats(0, 1e5), st.floats(0, 100))
def test_projection_is_affine(e, r, e2, r2):
    a, b = project(EmissionProfile(e, r), 50), project(EmissionProfile(e2, r2), 50)
    np.testing.assert_allclose(project(EmissionProfile(e + e2, r + r2), 50), a + b, rtol=1e-12)
