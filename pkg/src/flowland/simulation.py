"""Closed-loop landing runs and scenario sweeps."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .control import ControllerConfig, IndiController, PidConfig, PidController
from .dynamics import (
    Clearances,
    Terrain,
    TouchdownEvent,
    VehicleParams,
    VehicleState,
    clearances,
    step,
)
from .errors import ConfigError, FlowlandError
from .sensing import RateEstimator, observe

LOG_COLUMNS = (
    "t", "Y", "Z", "phi", "Ydot", "Zdot", "phidot", "h", "hL", "hR",
    "thetaL", "thetaR", "thetaY", "y1", "y2", "y3", "u1", "u2", "phase",
)
CONTROLLERS = ("indi", "pid")


@dataclass(frozen=True)
class ScenarioConfig:
    terrain: Terrain = field(default_factory=Terrain)
    params: VehicleParams = field(default_factory=VehicleParams)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    controller_kind: str = "indi"
    pid: PidConfig = field(default_factory=PidConfig)
    model: Optional[VehicleParams] = None  # controller's belief; None -> params
    initial: Optional[VehicleState] = None
    h0: float = 2.0
    Y0: float = 0.0
    kick: float = 1.0  # initial Zdot = kick * theta_star * h0
    dt: float = 0.002
    t_max: float = 120.0
    touchdown_threshold: float = 0.05
    name: str = ""

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("sim.dt", f"must be positive, got {self.dt!r}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError("sim.t_max", f"must be positive, got {self.t_max!r}")
        if not self.touchdown_threshold >= 0:
            raise ConfigError("sim.touchdown_threshold", "must be non-negative")
        if not math.isfinite(self.h0):
            raise ConfigError("sim.h0", "must be finite")
        if self.controller_kind not in CONTROLLERS:
            raise ConfigError("controller.kind", f"must be one of {CONTROLLERS}, got {self.controller_kind!r}")

    @property
    def controller_model(self) -> VehicleParams:
        return self.model if self.model is not None else self.params

    def initial_state(self) -> VehicleState:
        if self.initial is not None:
            return self.initial
        Z = self.h0 + self.Y0 * math.tan(self.terrain.alpha)
        return VehicleState(self.Y0, Z, 0.0, 0.0, self.kick * self.controller.theta_star * self.h0, 0.0)

    def mirrored(self) -> "ScenarioConfig":
        initial = self.initial.mirrored() if self.initial is not None else None
        return replace(self, terrain=self.terrain.mirrored(), initial=initial, Y0=-self.Y0)

    def make_controller(self):
        model = self.controller_model
        if self.controller_kind == "pid":
            return PidController(self.controller, self.pid, model, self.dt)
        return IndiController(self.controller, model, self.terrain, self.dt)


class Terminal(NamedTuple):
    kind: str  # "touchdown" | "timeout" | "failure"
    t: float
    state: VehicleState
    clearances: Optional[Clearances]
    message: str = ""


class SimLog:
    """Uniformly sampled closed-loop trace plus exactly one terminal event.

    ``rows`` follow :data:`LOG_COLUMNS`; the command in a row is the one held
    over the following step.
    """

    def __init__(self, dt: float, initial: VehicleState, rows=None, terminal: Optional[Terminal] = None,
                 roll_activation: Optional[int] = None):
        self.dt = dt
        self.initial = initial
        self.rows = rows if rows is not None else []
        self.terminal = terminal
        self.roll_activation = roll_activation
        self._cols = None

    def __len__(self):
        return len(self.rows)

    @property
    def touched_down(self) -> bool:
        return self.terminal is not None and self.terminal.kind == "touchdown"

    def column(self, name: str) -> np.ndarray:
        if self._cols is None:
            self._cols = {}
        if name not in self._cols:
            i = LOG_COLUMNS.index(name)
            if name == "phase":
                self._cols[name] = np.array([r[i] for r in self.rows], dtype=object)
            else:
                self._cols[name] = np.array([r[i] for r in self.rows], dtype=float)
        return self._cols[name]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.column(name)

    def states(self) -> np.ndarray:
        return np.array([r[1:7] for r in self.rows], dtype=float).reshape(-1, 6)


def run_scenario(cfg: ScenarioConfig) -> SimLog:
    """Simulate one landing until touchdown, timeout or numerical failure."""
    cfg.validate()
    dt = cfg.dt
    params = cfg.params
    terrain = cfg.terrain
    threshold = cfg.touchdown_threshold
    ctrl = cfg.make_controller()
    est = RateEstimator(dt, cfg.controller.tau_f)
    state = cfg.initial_state()
    log = SimLog(dt, state)
    rows = log.rows
    append = rows.append
    k = 0
    try:
        while True:
            t = k * dt
            clr = clearances(state, terrain, params, check=False)
            if min(clr.hL, clr.hR) <= threshold:
                ev = TouchdownEvent(t, state, clr)
                log.terminal = Terminal("touchdown", ev.t, ev.state, ev.clearances)
                break
            if t >= cfg.t_max:
                log.terminal = Terminal("timeout", t, state, clr)
                break
            obs = observe(clr, state)
            rates = est.update(obs)
            cmd = ctrl(state, obs, rates, est.warm)
            if log.roll_activation is None and ctrl.sup.roll_active:
                log.roll_activation = k
            append((t, *state, clr.h, clr.hL, clr.hR, *obs[:3], obs.y1, obs.y2, obs.y3,
                    cmd.u1, cmd.u2, ctrl.sup.phase))
            state = step(state, cmd, params, dt)
            k += 1
    except FlowlandError as exc:
        log.terminal = Terminal("failure", k * dt, state, None, f"{type(exc).__name__}: {exc}")
    return log


@dataclass
class SweepResult:
    id: str
    config: ScenarioConfig
    log: Optional[SimLog] = None
    metrics: Optional[object] = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and self.metrics is not None and self.metrics.complete


def scenario_ids(n: int):
    width = max(3, len(str(n - 1)))
    return [f"s{i:0{width}d}" for i in range(n)]


def _run_cell(item):
    from .analysis import landing_metrics

    sid, cfg = item
    try:
        log = run_scenario(cfg)
    except Exception as exc:  # a cell must never abort the sweep
        return SweepResult(sid, cfg, error=f"{type(exc).__name__}: {exc}")
    error = "" if log.touched_down else f"{log.terminal.kind}: {log.terminal.message}".rstrip(": ")
    return SweepResult(sid, cfg, log, landing_metrics(log, cfg), error)


def run_sweep(grid, jobs: int = 1, keep_logs: bool = True) -> dict:
    """Run every scenario and return results keyed by ordinal id.

    Ids come from grid order, so the mapping is identical whatever ``jobs`` is.
    """
    grid = list(grid)
    if not grid:
        raise ConfigError("sweep", "grid is empty")
    items = list(zip(scenario_ids(len(grid)), grid))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, items))
    else:
        results = [_run_cell(item) for item in items]
    if not keep_logs:
        for r in results:
            r.log = None
    return {r.id: r for r in sorted(results, key=lambda r: r.id)}
