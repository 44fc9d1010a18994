"""Flat-terrain landings at three setpoints with the height/velocity/divergence/thrust panels.

Usage: python scripts/flat_landing_figure.py [OUT_DIR]
"""
import sys
from dataclasses import replace
from pathlib import Path

from flowland import config, run_scenario
from flowland.logio import read_log_csv, write_log_csv
from flowland.svgplot import timeseries_svg


def run(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    base = config.scenario_from_raw(config.parse_text(config.default_text()))
    for theta_star in (-0.1, -0.2, -0.3):
        cfg = replace(base, controller=replace(base.controller, theta_star=theta_star))
        log = run_scenario(cfg)
        path = out / f"flat_{-theta_star:.1f}.csv"
        write_log_csv(log, path)
        path.with_suffix(".svg").write_text(timeseries_svg(read_log_csv(path)))
        print(f"theta*={theta_star}: touchdown at {log.terminal.t:.2f}s -> {path.with_suffix('.svg')}")
    return 0


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results/flat")))
