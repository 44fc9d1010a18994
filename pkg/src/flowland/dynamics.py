"""Planar lander model, terrain geometry and fixed-step RK4 integration.

State ordering is ``(Y, Z, phi, Ydot, Zdot, phidot)``; Z is world altitude and
the terrain is the line ``Z = Y * tan(alpha)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import GroundPenetrationError, IntegrationError, ModelEvaluationError

STATE_FIELDS = ("Y", "Z", "phi", "Ydot", "Zdot", "phidot")


class VehicleState(NamedTuple):
    Y: float = 0.0
    Z: float = 0.0
    phi: float = 0.0
    Ydot: float = 0.0
    Zdot: float = 0.0
    phidot: float = 0.0

    def mirrored(self) -> "VehicleState":
        return VehicleState(-self.Y, self.Z, -self.phi, -self.Ydot, self.Zdot, -self.phidot)


class ControlCommand(NamedTuple):
    u1: float
    u2: float = 0.0


class Clearances(NamedTuple):
    h: float
    hL: float
    hR: float
    hdot: float
    hLdot: float
    hRdot: float


@dataclass(frozen=True)
class VehicleParams:
    m: float = 1.0
    Ixx: float = 0.01
    bc: float = 0.2
    g: float = 9.81

    def __post_init__(self):
        for name in ("m", "Ixx", "bc", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def hover_thrust(self) -> float:
        return self.m * self.g


@dataclass(frozen=True)
class Terrain:
    alpha: float = 0.0  # rad, ground rises with +Y

    MAX_SLOPE = math.radians(80.0)

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and abs(self.alpha) < self.MAX_SLOPE):
            raise ValueError(f"|alpha| must be below {self.MAX_SLOPE:.4f} rad, got {self.alpha!r}")

    @classmethod
    def from_degrees(cls, deg: float) -> "Terrain":
        return cls(math.radians(deg))

    @property
    def tan(self) -> float:
        return math.tan(self.alpha)

    def mirrored(self) -> "Terrain":
        return Terrain(-self.alpha)


class TouchdownEvent(NamedTuple):
    t: float
    state: VehicleState
    clearances: Clearances


def derivatives(state, cmd, params: VehicleParams):
    """Six-component state rate under thrust ``u1`` and moment ``u2``."""
    Y, Z, phi, Ydot, Zdot, phidot = state
    u1, u2 = cmd
    if not all(map(math.isfinite, (Y, Z, phi, Ydot, Zdot, phidot, u1, u2))):
        raise ModelEvaluationError(f"non-finite input: state={tuple(state)}, cmd={tuple(cmd)}")
    a = u1 / params.m
    return (
        Ydot,
        Zdot,
        phidot,
        -a * math.sin(phi),
        a * math.cos(phi) - params.g,
        u2 / params.Ixx,
    )


def step(state: VehicleState, cmd: ControlCommand, params: VehicleParams, dt: float) -> VehicleState:
    """Advance one classical RK4 step with the command held over ``dt``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    m, g, Ixx = params.m, params.g, params.Ixx
    u1, u2 = cmd
    if not (math.isfinite(u1) and math.isfinite(u2)):
        raise ModelEvaluationError(f"non-finite command {tuple(cmd)}")
    a = u1 / m
    ddphi = u2 / Ixx
    sin, cos = math.sin, math.cos
    Y, Z, phi, vY, vZ, w = state

    # Rotational channel is input-only, so its stages are closed form.
    h2 = 0.5 * dt
    w1 = w
    p2 = phi + h2 * w1
    w2 = w + h2 * ddphi
    p3 = phi + h2 * w2
    p4 = phi + dt * w2
    w4 = w + dt * ddphi

    k1Y, k1Z = -a * sin(phi), a * cos(phi) - g
    k2Y, k2Z = -a * sin(p2), a * cos(p2) - g
    k3Y, k3Z = -a * sin(p3), a * cos(p3) - g
    k4Y, k4Z = -a * sin(p4), a * cos(p4) - g

    vY2 = vY + h2 * k1Y
    vZ2 = vZ + h2 * k1Z
    vY3 = vY + h2 * k2Y
    vZ3 = vZ + h2 * k2Z
    vY4 = vY + dt * k3Y
    vZ4 = vZ + dt * k3Z

    s = dt / 6.0
    new = VehicleState(
        Y + s * (vY + 2.0 * vY2 + 2.0 * vY3 + vY4),
        Z + s * (vZ + 2.0 * vZ2 + 2.0 * vZ3 + vZ4),
        phi + s * (w1 + 2.0 * w2 + 2.0 * w2 + w4),
        vY + s * (k1Y + 2.0 * k2Y + 2.0 * k3Y + k4Y),
        vZ + s * (k1Z + 2.0 * k2Z + 2.0 * k3Z + k4Z),
        w + dt * ddphi,
    )
    for name, value in zip(STATE_FIELDS, new):
        if not math.isfinite(value):
            raise IntegrationError(name, value)
    return new


def rk4_step_generic(state, cmd, params: VehicleParams, dt: float) -> VehicleState:
    """Textbook RK4 over :func:`derivatives`; reference for :func:`step`."""
    def add(x, k, c):
        return tuple(xi + c * ki for xi, ki in zip(x, k))

    k1 = derivatives(state, cmd, params)
    k2 = derivatives(add(state, k1, dt / 2), cmd, params)
    k3 = derivatives(add(state, k2, dt / 2), cmd, params)
    k4 = derivatives(add(state, k3, dt), cmd, params)
    return VehicleState(*(
        x + dt / 6.0 * (a + 2 * b + 2 * c + d)
        for x, a, b, c, d in zip(state, k1, k2, k3, k4)
    ))


def clearances(state, terrain: Terrain, params: VehicleParams, check: bool = True) -> Clearances:
    """Center and camera clearances above the slope, with their exact rates.

    Cameras sit at ``Y -/+ bc*cos(phi)`` and look straight down in the world
    frame. With ``check`` set, a non-positive clearance raises
    :class:`GroundPenetrationError`.
    """
    Y, Z, phi, Ydot, Zdot, phidot = state
    ta = math.tan(terrain.alpha)
    bc = params.bc
    s, c = math.sin(phi), math.cos(phi)
    h = Z - Y * ta
    d = bc * s - bc * c * ta
    hL = h - d
    hR = h + d
    hdot = Zdot - Ydot * ta
    dd = bc * c * phidot + bc * s * phidot * ta
    clr = Clearances(h, hL, hR, hdot, hdot - dd, hdot + dd)
    if check and not (h > 0 and hL > 0 and hR > 0):
        raise GroundPenetrationError(f"non-positive clearance h={h}, hL={hL}, hR={hR}")
    return clr


def touchdown_check(t: float, state, terrain: Terrain, params: VehicleParams,
                    threshold: float) -> Optional[TouchdownEvent]:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    clr = clearances(state, terrain, params, check=False)
    if min(clr.hL, clr.hR) <= threshold:
        return TouchdownEvent(t, VehicleState(*state), clr)
    return None
