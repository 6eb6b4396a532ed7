from importlib.resources import files
from pathlib import Path

import pytest

from microgrid_sizer.config import build_scenario, load_config

DATA = Path(str(files("microgrid_sizer") / "data"))
YEAR_CONFIG = DATA / "synthetic_year" / "scenario.toml"
WEEK_CONFIG = DATA / "fixture_week" / "scenario.toml"

_acceptance: dict[str, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion): exit criterion of the build")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    key = marker.args[0]
    _acceptance.setdefault(key, []).append((item.name, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: (int("".join(c for c in k if c.isdigit()) or 0), k)):
        results = _acceptance[key]
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: "
                                    f"{len(results)} check(s){detail}")


@pytest.fixture(scope="session")
def year_config():
    return load_config(YEAR_CONFIG)


@pytest.fixture(scope="session")
def year_scenario(year_config):
    return build_scenario(year_config)


@pytest.fixture(scope="session")
def week_config():
    return load_config(WEEK_CONFIG)


@pytest.fixture(scope="session")
def week_scenario(week_config):
    return build_scenario(week_config)
