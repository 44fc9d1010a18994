"""Flat-terrain setpoint sweep: y1 tracking RMSE of INDI and the tuned PID.

Usage: python scripts/setpoint_sweep.py [OUT_DIR] [--retune]
"""
import argparse
import sys
from pathlib import Path

from flowland.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run(out: Path, retune: bool) -> int:
    config = ROOT / "configs" / "setpoints.ini"
    if retune:
        code = main(["tune-pid", "--config", str(config), "--out", str(out / "tuning"), "--overwrite", "--jobs", "4"])
        if code:
            return code
        tuned = (out / "tuning" / "tuned.ini").read_text()
        config = out / "setpoints_tuned.ini"
        config.write_text(tuned + "\n[sweep]\ntheta_star = -0.1, -0.2, -0.3\ncontroller = indi, pid\n")
    code = main(["sweep", "--config", str(config), "--out", str(out / "sweep"), "--overwrite", "--jobs", "4"])
    if code:
        return code
    return main(["report", str(out / "sweep"), "--out", str(out / "setpoints.csv"), "--overwrite"])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="results/setpoints", type=Path)
    ap.add_argument("--retune", action="store_true", help="re-run the PID grid search before the sweep")
    args = ap.parse_args()
    sys.exit(run(args.out, args.retune))
