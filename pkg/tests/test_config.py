import shutil

import pytest

from microgrid_sizer.config import dump_config, load_config, parse_config
from microgrid_sizer.exceptions import ConfigError

from .conftest import WEEK_CONFIG

MINIMAL = """
[traces]
load = "load.csv"
weather = "weather.csv"
carbon_intensity = "carbon_intensity.csv"
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL, check_files=False)
    assert cfg.solar.losses == 0.14 and cfg.solar.unit_kw == 4000.0
    assert cfg.battery.unit_kwh == 7500.0 and cfg.battery.c_rate == 0.5
    assert cfg.space.wind == [0, 10] and cfg.space.battery == [0, 8]
    assert cfg.parameter_space().size == 1089
    assert cfg.search.population_size == 50 and cfg.search.max_evaluations == 350
    assert cfg.simulation.grid_charging is False
    assert cfg.embodied().battery_tco2_per_unit == 465.0


def test_range_error():
    with pytest.raises(ConfigError, match=r"solar\.losses"):
        parse_config(MINIMAL + "[solar]\nlosses = 1.5\n", check_files=False)


def test_cross_field_error():
    with pytest.raises(ConfigError, match=r"\[battery\]"):
        parse_config(MINIMAL + "[battery]\nmin_soc = 0.8\nmax_soc = 0.5\n", check_files=False)


def test_unknown_key_and_section():
    with pytest.raises(ConfigError, match=r"unknown key\(s\) in \[solar\]: lossses"):
        parse_config(MINIMAL + "[solar]\nlossses = 0.1\n", check_files=False)
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(MINIMAL + "[extras]\na = 1\n", check_files=False)


def test_type_error():
    with pytest.raises(ConfigError, match="expected int"):
        parse_config(MINIMAL + "[search]\nseed = 1.5\n", check_files=False)


def test_parse_error_reports_position():
    with pytest.raises(ConfigError, match=r"line \d+, column \d+"):
        parse_config("[traces\nload = 1\n", check_files=False)


def test_missing_trace_file(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(MINIMAL)
    with pytest.raises(ConfigError, match="file not found"):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config(tmp_path / "absent.toml")


def test_bundled_config_round_trips(tmp_path):
    for name in ("load.csv", "weather.csv", "carbon_intensity.csv"):
        shutil.copy(WEEK_CONFIG.parent / name, tmp_path / name)
    cfg = load_config(WEEK_CONFIG)
    text = dump_config(cfg)
    (tmp_path / "again.toml").write_text(text)
    again = load_config(tmp_path / "again.toml")
    assert again.to_dict() == cfg.to_dict()
    assert dump_config(again) == text
    assert again.digest() == cfg.digest()
