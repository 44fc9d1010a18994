import json
import math
from pathlib import Path

import pytest

from flowland import config as cfgmod
from flowland.cli import (EXIT_ALL_FAILED, EXIT_CONFIG, EXIT_REFUSE_OVERWRITE, EXIT_SIM_FAILURE, main)
from flowland.errors import ConfigError
from flowland.logio import HEADER, read_log_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_default_config_round_trips(base):
    raw = cfgmod.parse_text(cfgmod.default_text())
    again = cfgmod.parse_text(cfgmod.render(raw))
    assert again == raw
    assert cfgmod.scenario_from_raw(again) == base


def test_angles_are_degrees_in_files():
    cfg = cfgmod.scenario_from_raw(cfgmod.parse_text("[terrain]\nalpha = 20\n"))
    assert cfg.terrain.alpha == pytest.approx(math.radians(20))


@pytest.mark.parametrize("text, field", [
    ("[sim]\ndt = 0\n", "sim.dt"),
    ("[sim]\ndt = abc\n", "sim.dt"),
    ("[vehicle]\nm = -1\n", "vehicle.m"),
    ("[controller]\nk9 = 1\n", "controller.k9"),
    ("[controller]\ntheta_star = 0.2\n", "controller.theta_star"),
    ("[controller]\nkind = lqr\n", "controller.kind"),
    ("[pid]\nthrust = 1, 2\n", "pid.thrust"),
    ("[terrain]\nalpha = 89\n", "terrain.alpha"),
    ("[bogus]\nx = 1\n", "bogus"),
])
def test_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as exc:
        cfgmod.scenario_from_raw(cfgmod.parse_text(text))
    assert exc.value.field == field


def test_sweep_expansion_is_a_cross_product():
    raw = cfgmod.parse_text("[sweep]\nalpha = 10, 20, 30\ncontroller = indi, pid\n")
    cells = cfgmod.expand_sweep(raw)
    assert len(cells) == 6
    assert [(c["terrain"]["alpha"], c["controller"]["kind"]) for c in cells][:2] == [("10", "indi"), ("10", "pid")]


def test_empty_sweep_axis_is_rejected():
    with pytest.raises(ConfigError):
        cfgmod.expand_sweep(cfgmod.parse_text("[sweep]\nalpha =\n"))
    with pytest.raises(ConfigError):
        cfgmod.expand_sweep(cfgmod.parse_text("[sim]\ndt = 0.002\n"))


def test_run_writes_three_files(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["config.ini", "log.csv", "metrics.json"]
    assert (out / "log.csv").read_text().splitlines()[0] == HEADER
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["terminal"] == "touchdown" and metrics["log_schema_version"] == 1


def test_run_refuses_to_overwrite(tmp_path):
    out = str(tmp_path / "run")
    assert main(["run", "--out", out]) == 0
    assert main(["run", "--out", out]) == EXIT_REFUSE_OVERWRITE
    assert main(["run", "--out", out, "--overwrite"]) == 0


def test_run_reports_bad_config(tmp_path, capsys):
    cfg = write(tmp_path, "[sim]\ndt = 0\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "sim.dt" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_run_keeps_partial_log_on_failure(tmp_path):
    cfg = write(tmp_path, "[sim]\nt_max = 1.0\n")
    out = tmp_path / "o"
    assert main(["run", "--config", cfg, "--out", str(out)]) == EXIT_SIM_FAILURE
    assert len(read_log_csv(out / "log.csv")["t"]) == 500


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FLOWLAND_OUTPUT_ROOT", str(tmp_path / "root"))
    assert main(["run", "--out", "rel"]) == 0
    assert (tmp_path / "root" / "rel" / "log.csv").exists()


def test_snapshot_reproduces_log(tmp_path):
    cfg = write(tmp_path, "[terrain]\nalpha = 20\n[controller]\nkind = pid\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(a)]) == 0
    assert main(["run", "--config", str(a / "config.ini"), "--out", str(b)]) == 0
    assert (a / "config.ini").read_text() == Path(cfg).read_text()
    assert (a / "log.csv").read_bytes() == (b / "log.csv").read_bytes()


def test_csv_floats_have_nine_significant_digits(tmp_path):
    out = tmp_path / "r"
    main(["run", "--out", str(out)])
    row = (out / "log.csv").read_text().splitlines()[5].split(",")
    assert row[-1] == "descend"
    for cell in row[:-1]:
        digits = cell.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
        assert len(digits) <= 9


def test_sweep_and_report_setpoint_table(tmp_path, capsys):
    out = tmp_path / "t1"
    assert main(["sweep", "--config", str(CONFIGS / "setpoints.ini"), "--out", str(out), "--jobs", "2"]) == 0
    assert len(list((out / "cells").iterdir())) == 6
    capsys.readouterr()
    assert main(["report", str(out), "--out", str(tmp_path / "t1.csv")]) == 0
    lines = (tmp_path / "t1.csv").read_text().splitlines()
    assert len(lines) == 3 and [l.split(",")[0] for l in lines[1:]] == ["INDI", "PID"]
    assert all(len(l.split(",")) == 4 for l in lines)


def test_report_blanks_missing_cells(tmp_path, capsys):
    out = tmp_path / "t1"
    main(["sweep", "--config", str(CONFIGS / "setpoints.ini"), "--out", str(out)])
    for f in (out / "cells" / "s003").iterdir():
        f.unlink()
    capsys.readouterr()
    assert main(["report", str(out)]) == 0
    captured = capsys.readouterr()
    assert "warning: missing cell" in captured.err


def test_single_run_report(tmp_path, capsys):
    main(["run", "--out", str(tmp_path / "r")])
    capsys.readouterr()
    assert main(["report", str(tmp_path / "r"), "--out", str(tmp_path / "r.csv")]) == 0
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 2


def test_all_cells_failing_gives_distinct_code(tmp_path):
    cfg = write(tmp_path, "[sim]\nt_max = 0.1\n[sweep]\ntheta_star = -0.1, -0.2\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == EXIT_ALL_FAILED


def test_sweep_without_axes_is_a_config_error(tmp_path):
    cfg = write(tmp_path, "[sim]\ndt = 0.002\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")]) == EXIT_CONFIG


@pytest.fixture
def slope_run(tmp_path):
    cfg = write(tmp_path, "[terrain]\nalpha = 20\n")
    out = tmp_path / "slope"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    return out


def test_plot_panels(slope_run):
    for kind, panels in (("timeseries", 4), ("slope-landing", 5), ("trajectory", 1)):
        assert main(["plot", str(slope_run / "log.csv"), "--kind", kind]) == 0
        svg = (slope_run / f"{kind}.svg").read_text()
        assert svg.startswith("<svg") and svg.count('class="panel"') == panels


def test_trajectory_snapshot_spacing(slope_run):
    log = read_log_csv(slope_run / "log.csv")
    duration = log["t"][-1]
    for interval in (0.5, 1.0):
        out = slope_run / f"traj{interval}.svg"
        main(["plot", str(slope_run / "log.csv"), "--kind", "trajectory", "--interval", str(interval),
              "--out", str(out)])
        n = out.read_text().count('class="snapshot"')
        assert n in (math.floor(duration / interval) + 1, math.floor(duration / interval) + 2)


def test_plot_rejects_unknown_kind(slope_run):
    with pytest.raises(SystemExit) as exc:
        main(["plot", str(slope_run / "log.csv"), "--kind", "pie"])
    assert exc.value.code == 2


def test_plot_rejects_empty_log(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(HEADER + "\n")
    assert main(["plot", str(p), "--kind", "timeseries"]) == EXIT_CONFIG


def test_tune_pid_cli(tmp_path, capsys):
    cfg = write(tmp_path, "[pid]\nmoment = 0.02, 0, 0.001, 0.1\n")
    out = tmp_path / "tune"
    assert main(["tune-pid", "--config", cfg, "--out", str(out), "--jobs", "2"]) == 0
    tuned = cfgmod.load_scenario(out / "tuned.ini")
    assert tuned.pid.thrust.as_tuple() == (8.0, 2.0, 0.05)
    assert len((out / "tuning.csv").read_text().splitlines()) == 1 + 36
