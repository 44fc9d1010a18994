"""Landing metrics, decay fits, affine-model residuals and PID grid tuning."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .control import PidGains
from .errors import FitError, TuningError, UndefinedMetricError

COLD_START_TICKS = 2


def rmse(series, target: float = 0.0) -> float:
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise UndefinedMetricError("RMSE of an empty series")
    return float(np.sqrt(np.mean((x - target) ** 2)))


@dataclass(frozen=True)
class LandingMetrics:
    rmse_y1: float
    rmse_y2: float
    phi_f: float  # deg
    Y_drift: float
    v_td: float
    decay_slope: float
    complete: bool = True
    terminal: str = "touchdown"
    rmse_y2_align: float = float("nan")  # from roll activation to touchdown

    def as_dict(self):
        return asdict(self)


def _descent_slice(log):
    start = min(COLD_START_TICKS, max(len(log) - 1, 0))
    return slice(start, len(log))


def exp_decay_fit(log_or_t, h=None, window=(0.2, 0.8)) -> float:
    """Least-squares slope of ``ln h`` against time over a fraction of descent.

    Accepts a :class:`SimLog` or explicit ``(t, h)`` arrays. ``window`` gives
    the start and end of the fitted span as fractions of the descent time.
    """
    if h is None:
        t, h = log_or_t["t"], log_or_t["h"]
    else:
        t = log_or_t
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    if t.size < 2:
        raise FitError("need at least two samples")
    lo, hi = window
    if not 0.0 <= lo < hi <= 1.0:
        raise FitError(f"bad window {window!r}")
    t0, span = t[0], t[-1] - t[0]
    mask = (t >= t0 + lo * span) & (t <= t0 + hi * span)
    if mask.sum() < 2:
        raise FitError("window holds fewer than two samples")
    hw = h[mask]
    if np.any(hw <= 0):
        raise FitError("non-positive height inside the fit window")
    slope, _ = np.polyfit(t[mask] - t0, np.log(hw), 1)
    return float(slope)


def landing_metrics(log, cfg) -> LandingMetrics:
    term = log.terminal
    if term is None:
        raise UndefinedMetricError("log has no terminal event")
    final = term.state
    theta_star = cfg.controller.theta_star
    phi_f = math.degrees(final.phi)
    drift = final.Y - log.initial.Y
    if term.clearances is not None:
        v_td = abs(term.clearances.hdot)
    else:
        v_td = abs(final.Zdot - final.Ydot * math.tan(cfg.terrain.alpha))
    if len(log) == 0:
        return LandingMetrics(0.0, 0.0, phi_f, drift, v_td, float("nan"),
                              term.kind == "touchdown", term.kind)
    window = _descent_slice(log)
    rmse_y1 = rmse(log["y1"][window], theta_star)
    rmse_y2 = rmse(log["y2"][window], 0.0)
    align = float("nan")
    if log.roll_activation is not None:
        align = rmse(log["y2"][log.roll_activation:], 0.0)
    try:
        slope = exp_decay_fit(log)
    except FitError:
        slope = float("nan")
    return LandingMetrics(rmse_y1, rmse_y2, phi_f, drift, v_td, slope,
                          term.kind == "touchdown", term.kind, align)


def affine_model_rates(states, u1, u2, terrain, params):
    """Output rates predicted by the controller's small-angle affine model.

    The state-only terms (``zeta``) use the exact clearances, so the only
    approximations are the ones the controller itself makes.
    """
    s = np.atleast_2d(np.asarray(states, dtype=float))
    Y, Z, phi, Ydot, Zdot, phidot = s.T
    ta = math.tan(terrain.alpha)
    bc, m, Ixx, g = params.bc, params.m, params.Ixx, params.g
    sp, cp = np.sin(phi), np.cos(phi)
    h = Z - Y * ta
    d = bc * sp - bc * cp * ta
    hL, hR = h - d, h + d
    hdot = Zdot - Ydot * ta
    dd = bc * cp * phidot + bc * sp * phidot * ta
    hLdot, hRdot = hdot - dd, hdot + dd
    zeta1 = -hRdot**2 / (2 * hR**2) - hLdot**2 / (2 * hL**2)
    zeta2 = -hRdot**2 / hR**2 + hLdot**2 / hL**2
    zeta3 = -Ydot * hdot / h**2
    y1dot = (1 + phi * ta) / (m * h) * u1 - g / h + zeta1
    y2dot = 2 * bc / (Ixx * h) * u2 + zeta2
    y3dot = -sp / (m * h) * u1 + zeta3
    return y1dot, y2dot, y3dot


def affine_model_residual(log, cfg):
    """Per-interval residual between differenced outputs and the affine model.

    Interval ``k`` spans rows ``k`` and ``k+1`` under the command logged at
    row ``k``; the model is averaged over both ends. Returns a dict with the
    measured rates, model rates and residuals for each output.
    """
    n = len(log)
    out = {}
    if n < 2:
        for key in ("y1", "y2", "y3"):
            out[key] = {"measured": np.zeros(0), "model": np.zeros(0), "residual": np.zeros(0)}
        return out
    states = log.states()
    u1, u2 = log["u1"][:-1], log["u2"][:-1]
    a = affine_model_rates(states[:-1], u1, u2, cfg.terrain, cfg.params)
    b = affine_model_rates(states[1:], u1, u2, cfg.terrain, cfg.params)
    for i, key in enumerate(("y1", "y2", "y3")):
        y = log[key]
        measured = np.diff(y) / log.dt
        model = 0.5 * (a[i] + b[i])
        out[key] = {"measured": measured, "model": model, "residual": measured - model}
    return out


DEFAULT_THRUST_GRID = {
    "kp": (1.0, 2.0, 4.0, 8.0),
    "ki": (0.0, 0.5, 2.0),
    "kd": (0.0, 0.05, 0.2),
}
DEFAULT_MOMENT_GRID = {
    "kp": (0.005, 0.01, 0.02, 0.05, 0.1),
    "ki": (0.0, 0.01),
    "kd": (0.0, 0.001, 0.005),
}


def expand_grid(grid):
    if isinstance(grid, dict):
        return [tuple(map(float, c)) for c in itertools.product(grid["kp"], grid["ki"], grid["kd"])]
    return [tuple(map(float, c)) for c in grid]


def tune_pid(base, grid=None, channel: str = "thrust", jobs: int = 1):
    """Exhaustive deterministic search over ``(kp, ki, kd)`` for one PID channel.

    The thrust channel minimises y1 tracking RMSE, the moment channel y2
    regulation RMSE. Candidates that do not touch down are discarded; ties go
    to the lexicographically smallest gains. Returns the tuned
    :class:`PidConfig` and a list of ``(gains, rmse or None)``.
    """
    from .simulation import run_sweep

    if channel not in ("thrust", "moment"):
        raise ValueError(f"unknown channel {channel!r}")
    if grid is None:
        grid = DEFAULT_THRUST_GRID if channel == "thrust" else DEFAULT_MOMENT_GRID
    candidates = expand_grid(grid)
    if not candidates:
        raise TuningError("empty gain grid")
    base = replace(base, controller_kind="pid")
    configs = []
    for kp, ki, kd in candidates:
        old = getattr(base.pid, channel)
        gains = PidGains(kp, ki, kd, old.i_limit)
        configs.append(replace(base, pid=replace(base.pid, **{channel: gains})))
    results = run_sweep(configs, jobs=jobs, keep_logs=False)
    metric = "rmse_y1" if channel == "thrust" else "rmse_y2"
    table = []
    for gains, res in zip(candidates, results.values()):
        score = getattr(res.metrics, metric) if res.ok else None
        if score is not None and not math.isfinite(score):
            score = None
        table.append((gains, score))
    scored = [(score, gains) for gains, score in table if score is not None]
    if not scored:
        raise TuningError(f"no stable candidate among {len(candidates)}")
    _, best = min(scored)
    old = getattr(base.pid, channel)
    return replace(base.pid, **{channel: PidGains(*best, old.i_limit)}), table
