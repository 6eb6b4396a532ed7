import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microgrid_sizer.storage import (BatteryParams, BatteryState, BatteryUnit, battery_step,
                                     equivalent_cycles)

HOUR = 3600.0


def params(**kw):
    base = dict(capacity_kwh=10.0, max_charge_kw=5.0, max_discharge_kw=5.0, min_soc=0.0,
                max_soc=1.0, charge_efficiency=0.9, discharge_efficiency=0.9)
    base.update(kw)
    return BatteryParams(**base)


def test_full_battery_rejects_charge():
    p = params(min_soc=0.1, max_soc=0.9)
    full = BatteryState(p.ceiling_kwh)
    state, actual = battery_step(p, full, 100.0, HOUR)
    assert actual == 0.0 and state == full


def test_empty_battery_rejects_discharge():
    p = params(min_soc=0.1, max_soc=0.9)
    empty = BatteryState(p.floor_kwh)
    state, actual = battery_step(p, empty, -100.0, HOUR)
    assert actual == 0.0 and state == empty


def test_partial_charge():
    p = params()
    state, actual = battery_step(p, BatteryState(5.0), 2.0, HOUR)
    assert actual == 2.0
    assert state.stored_kwh == pytest.approx(6.8, abs=1e-12)
    assert state.cumulative_charge_kwh == 2.0


def test_rate_limit_and_headroom_clamp():
    p = params()
    _, actual = battery_step(p, BatteryState(0.0), 50.0, HOUR)
    assert actual == 5.0
    state, actual = battery_step(p, BatteryState(9.0), 5.0, HOUR)
    assert state.stored_kwh == 10.0
    assert actual == pytest.approx(1.0 / 0.9)


def test_discharge_bookkeeping():
    p = params()
    state, actual = battery_step(p, BatteryState(5.0), -1.8, HOUR)
    assert actual == -1.8
    assert state.stored_kwh == pytest.approx(5.0 - 2.0)
    assert state.cumulative_discharge_kwh == 1.8


def test_taper_reduces_charge_limit_near_full():
    p = params(taper_knee_soc=0.5)
    _, below = battery_step(p, BatteryState(4.0), 5.0, 60.0)
    _, above = battery_step(p, BatteryState(7.5), 5.0, 60.0)
    assert below == 5.0
    assert above == pytest.approx(5.0 * (10 - 7.5) / (10 - 5))


def test_cycles():
    p = params()
    assert equivalent_cycles(p, BatteryState(0.0)) == 0.0
    assert equivalent_cycles(p, BatteryState(0.0, cumulative_discharge_kwh=250.0)) == 25.0
    with pytest.raises(ValueError):
        equivalent_cycles(params(capacity_kwh=0.0), BatteryState(0.0))


def test_unit_scaling_defaults():
    p = BatteryUnit().params(2)
    assert p.capacity_kwh == 15000 and p.max_charge_kw == 7500 and p.max_discharge_kw == 7500
    assert BatteryState.initial(p).stored_kwh == pytest.approx(1500.0)


@pytest.mark.parametrize("kw", [{"min_soc": 0.5, "max_soc": 0.4}, {"charge_efficiency": 0},
                                {"discharge_efficiency": 1.2}, {"capacity_kwh": -1},
                                {"initial_soc": 2.0}])
def test_param_validation(kw):
    with pytest.raises(ValueError):
        params(**kw)


battery_params = st.builds(
    lambda cap, lo, span, ec, ed, rc, rd: BatteryParams(cap, rc, rd, lo, lo + span * (1 - lo), ec, ed),
    st.floats(0.5, 1e5), st.floats(0, 0.5), st.floats(0.05, 1), st.floats(0.5, 1),
    st.floats(0.5, 1), st.floats(0.01, 1e5), st.floats(0.01, 1e5))


@settings(max_examples=200, deadline=None)
@given(battery_params, st.floats(0, 1), st.floats(-2e5, 2e5), st.floats(1, 7200))
def test_step_is_idempotent_on_clamped_request(p, frac, request, dt):
    state = BatteryState(p.floor_kwh + frac * (p.ceiling_kwh - p.floor_kwh))
    s1, a1 = battery_step(p, state, request, dt)
    s2, a2 = battery_step(p, state, a1, dt)
    assert (s1, a1) == (s2, a2)
    assert abs(a1) <= abs(request)


@settings(max_examples=200, deadline=None)
@given(battery_params, st.lists(st.floats(-2e5, 2e5), min_size=1, max_size=30),
       st.floats(1, 7200))
def test_energy_bookkeeping(p, requests, dt):
    state = BatteryState.initial(p)
    start = state.stored_kwh
    for r in requests:
        state, _ = battery_step(p, state, r, dt)
        assert p.floor_kwh <= state.stored_kwh <= p.ceiling_kwh
    expected = (p.charge_efficiency * state.cumulative_charge_kwh
                - state.cumulative_discharge_kwh / p.discharge_efficiency)
    assert state.stored_kwh - start == pytest.approx(expected, rel=1e-9, abs=1e-9 * p.capacity_kwh)
