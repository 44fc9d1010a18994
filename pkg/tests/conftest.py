import functools
import math
from dataclasses import replace

import pytest

from flowland.config import default_text, parse_text, scenario_from_raw
from flowland.dynamics import Terrain
from flowland.simulation import run_scenario


@functools.lru_cache(maxsize=None)
def base_config():
    return scenario_from_raw(parse_text(default_text()))


def scenario(theta_star=None, alpha_deg=0.0, kind="indi", drift=True, **sim):
    base = base_config()
    ctrl = replace(base.controller, drift_compensation=drift)
    if theta_star is not None:
        ctrl = replace(ctrl, theta_star=theta_star)
    return replace(base, controller=ctrl, controller_kind=kind,
                   terrain=Terrain(math.radians(alpha_deg)), **sim)


@functools.lru_cache(maxsize=None)
def cached_run(theta_star=-0.2, alpha_deg=0.0, kind="indi", drift=True):
    """Closed-loop runs shared across test modules (each is deterministic)."""
    return run_scenario(scenario(theta_star, alpha_deg, kind, drift))


@pytest.fixture
def base():
    return base_config()


CRITERIA = {}


def record_criterion(number, passed, detail):
    CRITERIA.setdefault(number, []).append((passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        checks = CRITERIA[number]
        ok = all(p for p, _ in checks)
        failed = [d for p, d in checks if not p]
        summary = "; ".join(failed) if failed else checks[-1][1]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {summary}")
