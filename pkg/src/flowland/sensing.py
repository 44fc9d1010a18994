"""Flow-divergence observables and output-rate estimation."""
from __future__ import annotations

from typing import NamedTuple

from .errors import ObservationUnavailableError


class Observations(NamedTuple):
    thetaL: float
    thetaR: float
    thetaY: float
    y1: float
    y2: float
    y3: float

    @property
    def outputs(self):
        return (self.y1, self.y2, self.y3)


class OutputRates(NamedTuple):
    y1dot: float = 0.0
    y2dot: float = 0.0
    y3dot: float = 0.0


def observe(clr, state) -> Observations:
    """Local divergences at both cameras and ventral flow at the body center."""
    h, hL, hR, _, hLdot, hRdot = clr
    if not (h > 0 and hL > 0 and hR > 0):
        raise ObservationUnavailableError(f"clearances must be positive: h={h}, hL={hL}, hR={hR}")
    thetaL = hLdot / hL
    thetaR = hRdot / hR
    thetaY = state[3] / h
    return Observations(thetaL, thetaR, thetaY, 0.5 * (thetaR + thetaL), thetaR - thetaL, thetaY)


class RateEstimator:
    """Backward difference of ``(y1, y2, y3)`` through a first-order low-pass.

    The filter is seeded with the first available difference, so a ramp input
    is reproduced exactly for any ``tau``. Rates are zero until two samples
    have been seen.
    """

    def __init__(self, dt: float, tau: float = 0.02):
        if not dt > 0:
            raise ValueError("dt must be positive")
        if tau < 0:
            raise ValueError("tau must be non-negative")
        self.dt = dt
        self.tau = tau
        self.gain = dt / (tau + dt)
        self.reset()

    def reset(self):
        self._prev = None
        self._rates = None

    @property
    def warm(self) -> bool:
        return self._rates is not None

    def update(self, obs) -> OutputRates:
        y = (obs.y1, obs.y2, obs.y3) if isinstance(obs, Observations) else tuple(obs)
        prev, self._prev = self._prev, y
        if prev is None:
            return OutputRates()
        raw = [(a - b) / self.dt for a, b in zip(y, prev)]
        if self._rates is None:
            self._rates = raw
        else:
            k = self.gain
            self._rates = [r + k * (x - r) for r, x in zip(self._rates, raw)]
        return OutputRates(*self._rates)


def estimate_output_rates(history, dt: float, tau: float = 0.0, filter_state=None):
    """Functional form of :class:`RateEstimator` for a history of samples.

    ``history`` holds the most recent observations, oldest first. Returns the
    rates and the updated filter state (previous filtered rates).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if len(history) < 2:
        return OutputRates(), filter_state
    a, b = history[-1], history[-2]
    ya = (a.y1, a.y2, a.y3) if isinstance(a, Observations) else tuple(a)
    yb = (b.y1, b.y2, b.y3) if isinstance(b, Observations) else tuple(b)
    raw = [(x - y) / dt for x, y in zip(ya, yb)]
    if filter_state is None:
        rates = raw
    else:
        k = dt / (tau + dt)
        rates = [r + k * (x - r) for r, x in zip(filter_state, raw)]
    return OutputRates(*rates), tuple(rates)
