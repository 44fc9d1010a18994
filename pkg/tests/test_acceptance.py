"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the per-criterion summary is
printed at the end of the session.
"""
import functools
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from conftest import base_config, cached_run, record_criterion, scenario
from flowland.analysis import affine_model_residual, exp_decay_fit, landing_metrics, rmse, tune_pid
from flowland.cli import main
from flowland.dynamics import Terrain, VehicleParams, VehicleState, clearances
from flowland.logio import log_to_csv
from flowland.report import build_report
from flowland.sensing import observe
from flowland.simulation import run_scenario

SETPOINTS = (-0.1, -0.2, -0.3)
SLOPES = (10.0, 20.0, 30.0)
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def check(number, passed, detail):
    record_criterion(number, bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    return passed


@functools.lru_cache(maxsize=None)
def tuned_pid():
    """PID gains from the grid search at the reference setpoint on flat terrain."""
    pid, _ = tune_pid(replace(base_config(), controller_kind="pid"), jobs=4)
    return pid


@functools.lru_cache(maxsize=None)
def pid_run(theta_star, alpha_deg=0.0):
    cfg = replace(scenario(theta_star, alpha_deg, "pid"), pid=tuned_pid())
    return cfg, run_scenario(cfg)


def metrics(theta_star=-0.2, alpha_deg=0.0, kind="indi", drift=True):
    if kind == "pid":
        cfg, log = pid_run(theta_star, alpha_deg)
    else:
        cfg, log = scenario(theta_star, alpha_deg, kind, drift), cached_run(theta_star, alpha_deg, kind, drift)
    return landing_metrics(log, cfg)


@pytest.mark.parametrize("theta_star", SETPOINTS)
def test_c1_exponential_decay_tracking(theta_star):
    log = cached_run(theta_star)
    slope = exp_decay_fit(log)
    err = rmse(log["y1"][2:], theta_star)
    ok = abs(slope - theta_star) <= 0.1 * abs(theta_star) and err <= 0.1 * abs(theta_star)
    check(1, ok, f"theta*={theta_star}: fitted slope {slope:.5f}, y1 RMSE {err:.2e}")
    assert ok


@pytest.mark.parametrize("theta_star", SETPOINTS)
def test_c2_height_and_velocity_vanish_together(theta_star):
    log = cached_run(theta_star)
    h, hdot = log["h"][-1], log["Zdot"][-1]
    div = hdot / h
    term = log.terminal.clearances
    ok = abs(div - theta_star) <= 0.5 * abs(theta_star) and abs(term.hdot) <= 1.5 * abs(theta_star) * term.h
    check(2, ok, f"theta*={theta_star}: last divergence {div:.5f}, v_td {abs(term.hdot):.4f} m/s at h={term.h:.4f}")
    assert ok


@pytest.mark.parametrize("theta_star", SETPOINTS)
def test_c3_indi_tracks_better_than_tuned_pid(theta_star):
    indi = metrics(theta_star).rmse_y1
    pid = metrics(theta_star, kind="pid").rmse_y1
    ok = indi < pid
    check(3, ok, f"theta*={theta_star}: INDI {indi:.2e} < PID {pid:.2e} (PID thrust {tuned_pid().thrust.as_tuple()})")
    assert ok


@pytest.mark.parametrize("alpha", SLOPES)
def test_c4_slope_alignment(alpha):
    cfg = scenario(-0.2, alpha)
    log = cached_run(-0.2, alpha)
    m = landing_metrics(log, cfg)
    term = log.terminal
    y2_td = observe(term.clearances, term.state).y2
    y2_last = log["y2"][-1]
    ok = abs(m.phi_f - alpha) <= 3.0 and abs(y2_td) < cfg.controller.eps_y and abs(y2_last) < cfg.controller.eps_y
    check(4, ok, f"alpha={alpha:g}: phi_f {m.phi_f:.2f} deg, |y2| at touchdown {abs(y2_td):.4f} "
                 f"(last sample {abs(y2_last):.4f})")
    assert ok


@pytest.mark.parametrize("alpha", SLOPES)
def test_c5_drift_compensation(alpha):
    on = metrics(-0.2, alpha).Y_drift
    off = metrics(-0.2, alpha, drift=False).Y_drift
    pid = metrics(-0.2, alpha, kind="pid").Y_drift
    ok = abs(on) < abs(off) and abs(on) < abs(pid)
    check(5, ok, f"alpha={alpha:g}: |Y_drift| INDI {abs(on):.3f} m, without compensation {abs(off):.3f} m, "
                 f"PID {abs(pid):.3f} m")
    assert ok


@pytest.mark.parametrize("alpha", SLOPES)
def test_c6_y2_regulation_ordering(alpha):
    indi = metrics(-0.2, alpha).rmse_y2
    pid = metrics(-0.2, alpha, kind="pid").rmse_y2
    ok = indi < pid
    check(6, ok, f"alpha={alpha:g}: rmse_y2 INDI {indi:.5f} vs PID {pid:.5f}")
    assert ok


def ray_intersections(Yc, Zc, alpha):
    """Distance along a downward vertical ray to the line through the origin at angle alpha."""
    # ray (Yc, Zc - s) meets q*(cos a, sin a): solve the 2x2 system per sample
    A = np.zeros((len(Yc), 2, 2))
    A[:, 0, 1] = -np.cos(alpha)
    A[:, 1, 0] = -1.0
    A[:, 1, 1] = -np.sin(alpha)
    b = np.stack([-Yc, -Zc], axis=1)
    return np.linalg.solve(A, b[..., None])[:, 0, 0]


def test_c7_geometry_oracle():
    rng = np.random.default_rng(20240607)
    n = 10_000
    p = VehicleParams()
    alpha = rng.uniform(-math.radians(35), math.radians(35), n)
    Y = rng.uniform(-5, 5, n)
    h = rng.uniform(0.5, 10, n)
    Z = h + Y * np.tan(alpha)
    phi = rng.uniform(-1.2, 1.2, n)
    c, s = np.cos(phi), np.sin(phi)
    want = np.stack([ray_intersections(Y, Z, alpha),
                     ray_intersections(Y - p.bc * c, Z - p.bc * s, alpha),
                     ray_intersections(Y + p.bc * c, Z + p.bc * s, alpha)], axis=1)
    got = np.array([clearances(VehicleState(Y[i], Z[i], phi[i]), Terrain(alpha[i]), p)[:3] for i in range(n)])
    worst = float(np.max(np.abs(got - want) / np.abs(want)))
    ok = worst <= 1e-12
    check(7, ok, f"max relative error {worst:.2e} over {n} states")
    assert ok


def test_c8_affine_model_residual():
    cfg = base_config()
    res = affine_model_residual(cached_run(-0.2), cfg)["y1"]
    median = float(np.median(np.abs(res["residual"])))
    scale = float(np.sqrt(np.mean(res["measured"] ** 2)))
    ok = median < 0.02 * scale
    check(8, ok, f"median |residual| {median:.2e} vs 2% of RMS {0.02 * scale:.2e}")
    assert ok


MIRRORED = {"Y": -1, "phi": -1, "Ydot": -1, "phidot": -1, "thetaY": -1, "y2": -1, "y3": -1, "u2": -1}
SWAPPED = {"hL": "hR", "hR": "hL", "thetaL": "thetaR", "thetaR": "thetaL"}


@pytest.mark.parametrize("kind", ["indi", "pid"])
def test_c9_symmetry(kind):
    flat = max(float(np.max(np.abs(cached_run(th, 0.0, kind)["y2"]))) for th in SETPOINTS)
    worst = 0.0
    for alpha in SLOPES:
        cfg = scenario(-0.2, alpha, kind)
        if kind == "pid":
            cfg = replace(cfg, pid=tuned_pid())
        a, b = run_scenario(cfg), run_scenario(cfg.mirrored())
        assert len(a) == len(b)
        for name in ("Y", "Z", "phi", "Ydot", "Zdot", "phidot", "h", "hL", "hR", "thetaL", "thetaR",
                     "thetaY", "y1", "y2", "y3", "u1", "u2"):
            mirrored = MIRRORED.get(name, 1) * b[SWAPPED.get(name, name)]
            worst = max(worst, float(np.max(np.abs(a[name] - mirrored))))
    ok = flat <= 1e-10 and worst <= 1e-9
    check(9, ok, f"{kind}: flat max|y2| {flat:.1e}, mirrored log mismatch {worst:.1e}")
    assert ok


def test_c10_determinism_and_report_shapes(tmp_path, capsys):
    reruns = all(
        log_to_csv(run_scenario(scenario(-0.2, alpha, kind))) == log_to_csv(run_scenario(scenario(-0.2, alpha, kind)))
        for alpha in (0.0, 20.0) for kind in ("indi", "pid")
    )
    a, b = tmp_path / "a", tmp_path / "b"
    main(["run", "--config", str(CONFIGS / "slope20.ini"), "--out", str(a)])
    main(["run", "--config", str(a / "config.ini"), "--out", str(b)])
    snapshot = (a / "log.csv").read_bytes() == (b / "log.csv").read_bytes()
    shapes = {}
    for name in ("setpoints", "slopes"):
        out = tmp_path / name
        assert main(["sweep", "--config", str(CONFIGS / f"{name}.ini"), "--out", str(out), "--jobs", "4"]) == 0
        shapes[name] = build_report(out).shape
    capsys.readouterr()
    ok = reruns and snapshot and shapes == {"setpoints": (2, 3), "slopes": (2, 9)}
    check(10, ok, f"reruns identical {reruns}, snapshot rerun identical {snapshot}, report shapes {shapes}")
    assert ok
