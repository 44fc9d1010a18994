"""Flow-divergence INDI controller, touchdown supervisor and PID baseline.

Outputs: ``y1`` mean divergence (thrust), ``y2`` divergence difference
(moment, only once the supervisor latches), ``y3`` ventral flow (thrust
correction against lateral drift, latched together with ``y2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

from .dynamics import ControlCommand, Terrain, VehicleParams
from .errors import EffectivenessUndefinedError

DESCEND, ALIGN, CONTACT = "descend", "align", "contact"
TRUE_STATE, FIXED_NOMINAL = "true_state", "fixed_nominal"


@dataclass(frozen=True)
class ControllerConfig:
    theta_star: float = -0.2
    k1: float = 2.0
    k2: float = 5.0
    k3: float = 1.0
    eps_y: float = 0.05
    eps_phi: float = 0.02
    effectiveness_mode: str = TRUE_STATE
    nominal_h: float = 2.0
    u1_max: Optional[float] = None  # None -> 4 * m * g of the controller model
    u2_max: float = 1.0
    tau_f: float = 0.002
    drift_compensation: bool = True

    def __post_init__(self):
        if not self.theta_star < 0:
            raise ValueError("theta_star must be negative")
        for name in ("k1", "k2", "k3", "eps_y", "eps_phi", "nominal_h", "u2_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tau_f < 0:
            raise ValueError("tau_f must be non-negative")
        if self.u1_max is not None and not self.u1_max > 0:
            raise ValueError("u1_max must be positive")
        if self.effectiveness_mode not in (TRUE_STATE, FIXED_NOMINAL):
            raise ValueError(f"unknown effectiveness_mode {self.effectiveness_mode!r}")

    def thrust_limit(self, params: VehicleParams) -> float:
        return self.u1_max if self.u1_max is not None else 4.0 * params.m * params.g

    def with_limits(self, params: VehicleParams) -> "ControllerConfig":
        return replace(self, u1_max=self.thrust_limit(params))


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    i_limit: float = 1.0

    def __post_init__(self):
        if min(self.kp, self.ki, self.kd) < 0 or self.i_limit < 0:
            raise ValueError("PID gains and integrator limit must be non-negative")

    def as_tuple(self):
        return (self.kp, self.ki, self.kd)


@dataclass(frozen=True)
class PidConfig:
    thrust: PidGains = field(default_factory=lambda: PidGains(8.0, 2.0, 0.05, 2.0))
    moment: PidGains = field(default_factory=lambda: PidGains(0.02, 0.0, 0.001, 0.1))
    drift: PidGains = field(default_factory=lambda: PidGains(0.5, 0.0, 0.0, 1.0))


class SupervisorState(NamedTuple):
    roll_active: bool = False
    drift_comp_active: bool = False
    phase: str = DESCEND


class VirtualInputs(NamedTuple):
    nu1: float
    nu2: float
    nu3: float


class Effectiveness(NamedTuple):
    g1: float
    g2: float
    g3: float


class ControlIncrements(NamedTuple):
    du1: float = 0.0
    du2: float = 0.0
    du1p: float = 0.0
    singular: bool = False


def supervise(obs, sup: SupervisorState, cfg: ControllerConfig) -> SupervisorState:
    """Latch roll alignment (and drift compensation) once ``|y2| > eps_y``."""
    if sup.roll_active or abs(obs.y2) <= cfg.eps_y:
        return sup
    return SupervisorState(True, cfg.drift_compensation, ALIGN)


def virtual_inputs(obs, cfg: ControllerConfig, sup: SupervisorState) -> VirtualInputs:
    nu1 = cfg.k1 * (cfg.theta_star - obs.y1)
    nu2 = cfg.k2 * -obs.y2 if sup.roll_active else 0.0
    nu3 = cfg.k3 * -obs.y3 if sup.drift_comp_active else 0.0
    return VirtualInputs(nu1, nu2, nu3)


def effectiveness(state, terrain: Terrain, params: VehicleParams, cfg: ControllerConfig) -> Effectiveness:
    """Input-to-output-rate gains of the small-angle affine model."""
    if cfg.effectiveness_mode == FIXED_NOMINAL:
        h, phi, ta = cfg.nominal_h, 0.0, 0.0
    else:
        ta = math.tan(terrain.alpha)
        h = state[1] - state[0] * ta
        phi = state[2]
    if not h > 0:
        raise EffectivenessUndefinedError(f"clearance term must be positive, got {h}")
    mh = params.m * h
    return Effectiveness(
        (1.0 + phi * ta) / mh,
        2.0 * params.bc / (params.Ixx * h),
        -math.sin(phi) / mh,
    )


def _invert(err, gain):
    if gain == 0.0 or not math.isfinite(gain):
        return None
    out = err / gain
    return out if math.isfinite(out) else None


def indi_increment(nu: VirtualInputs, rates, eff: Effectiveness, cfg: ControllerConfig,
                   sup: SupervisorState, phi: float = 0.0) -> ControlIncrements:
    """Invert the local effectiveness; singular channels yield no increment.

    ``phi`` feeds the ``|sin(phi)| > eps_phi`` guard of the ventral channel,
    whose effectiveness vanishes at level attitude.
    """
    du1 = _invert(nu.nu1 - rates[0], eff.g1)
    if du1 is None:
        return ControlIncrements(singular=True)
    du2 = 0.0
    if sup.roll_active:
        du2 = _invert(nu.nu2 - rates[1], eff.g2)
        if du2 is None:
            return ControlIncrements(singular=True)
    du1p = 0.0
    if sup.drift_comp_active and abs(math.sin(phi)) > cfg.eps_phi:
        du1p = _invert(nu.nu3 - rates[2], eff.g3)
        if du1p is None:
            return ControlIncrements(du1, du2, 0.0, True)
    return ControlIncrements(du1, du2, du1p)


def _clamp(x, lo, hi):
    return lo if x < lo else hi if x > hi else x


def update_command(prev: ControlCommand, inc: ControlIncrements, cfg: ControllerConfig) -> ControlCommand:
    if cfg.u1_max is None:
        raise ValueError("update_command needs a resolved u1_max; see ControllerConfig.with_limits")
    return ControlCommand(
        _clamp(prev.u1 + inc.du1 + inc.du1p, 0.0, cfg.u1_max),
        _clamp(prev.u2 + inc.du2, -cfg.u2_max, cfg.u2_max),
    )


def constant_divergence_reference(h0: float, theta_star: float, t: float):
    """Height, rate and acceleration of an exact constant-divergence descent."""
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    h = h0 * math.exp(theta_star * t)
    return h, theta_star * h, theta_star * theta_star * h


class IndiController:
    """Per-run INDI state: supervisor latch and the command filter.

    The increment is added to the previous command passed through the same
    low-pass as the output-rate estimate, which keeps the measured rate and
    the reference command time-aligned. With ``tau_f = 0`` this is exactly the
    previous command.
    """

    kind = "indi"

    def __init__(self, cfg: ControllerConfig, model: VehicleParams, terrain: Terrain, dt: float):
        self.cfg = cfg.with_limits(model)
        self.model = model
        self.terrain = terrain
        self.gain = dt / (cfg.tau_f + dt)
        self.reset()

    def reset(self):
        self.sup = SupervisorState()
        self.cmd = ControlCommand(self.model.hover_thrust, 0.0)
        self._ref = None
        self.singular_ticks = 0

    def __call__(self, state, obs, rates, warm: bool) -> ControlCommand:
        cfg = self.cfg
        self.sup = supervise(obs, self.sup, cfg)
        if not warm:
            return self.cmd
        last = self.cmd
        if self._ref is None:
            self._ref = last
        else:
            k = self.gain
            r = self._ref
            self._ref = ControlCommand(r.u1 + k * (last.u1 - r.u1), r.u2 + k * (last.u2 - r.u2))
        nu = virtual_inputs(obs, cfg, self.sup)
        try:
            eff = effectiveness(state, self.terrain, self.model, cfg)
        except EffectivenessUndefinedError:
            self.singular_ticks += 1
            return self.cmd
        inc = indi_increment(nu, rates, eff, cfg, self.sup, state[2])
        if inc.singular:
            self.singular_ticks += 1
        self.cmd = update_command(self._ref, inc, cfg)
        return self.cmd


class PidChannel:
    def __init__(self, gains: PidGains, dt: float):
        self.gains = gains
        self.dt = dt
        self.integral = 0.0

    def __call__(self, error: float, error_rate: float) -> float:
        g = self.gains
        self.integral = _clamp(self.integral + error * self.dt, -g.i_limit, g.i_limit)
        return g.kp * error + g.ki * self.integral + g.kd * error_rate


def pid_command(obs, rates, channels, cfg: ControllerConfig, sup: SupervisorState,
                trim: float, phi: float = 0.0) -> ControlCommand:
    """One PID tick; ``channels`` is ``(thrust, moment, drift)`` :class:`PidChannel`.

    The drift term is signed by ``-sin(phi)`` so that it always opposes the
    lateral acceleration produced by tilted thrust, and it is zeroed under the
    same ``eps_phi`` guard as the INDI ventral channel.
    """
    thrust, moment, drift = channels
    u1 = trim + thrust(cfg.theta_star - obs.y1, -rates[0])
    u2 = 0.0
    if sup.roll_active:
        u2 = moment(-obs.y2, -rates[1])
    if sup.drift_comp_active:
        correction = drift(-obs.y3, -rates[2])
        s = math.sin(phi)
        if abs(s) > cfg.eps_phi:
            u1 -= math.copysign(1.0, s) * correction
    return ControlCommand(_clamp(u1, 0.0, cfg.u1_max), _clamp(u2, -cfg.u2_max, cfg.u2_max))


class PidController:
    kind = "pid"

    def __init__(self, cfg: ControllerConfig, pid: PidConfig, model: VehicleParams, dt: float):
        self.cfg = cfg.with_limits(model)
        self.pid = pid
        self.model = model
        self.dt = dt
        self.reset()

    def reset(self):
        self.sup = SupervisorState()
        self.channels = (
            PidChannel(self.pid.thrust, self.dt),
            PidChannel(self.pid.moment, self.dt),
            PidChannel(self.pid.drift, self.dt),
        )
        self.cmd = ControlCommand(self.model.hover_thrust, 0.0)
        self.singular_ticks = 0

    def __call__(self, state, obs, rates, warm: bool) -> ControlCommand:
        self.sup = supervise(obs, self.sup, self.cfg)
        self.cmd = pid_command(obs, rates, self.channels, self.cfg, self.sup,
                               self.model.hover_thrust, state[2])
        return self.cmd
