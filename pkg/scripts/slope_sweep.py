"""Slope sweep: y2 RMSE, final roll and lateral drift for INDI and the tuned PID,
plus the INDI drift-compensation ablation and per-slope figures.

Usage: python scripts/slope_sweep.py [OUT_DIR]
"""
import argparse
import sys
from pathlib import Path

from flowland.cli import main

ROOT = Path(__file__).resolve().parent.parent


def run(out: Path) -> int:
    for name in ("slopes", "drift"):
        code = main(["sweep", "--config", str(ROOT / "configs" / f"{name}.ini"), "--out", str(out / name),
                     "--overwrite", "--jobs", "4"])
        if code:
            return code
        main(["report", str(out / name), "--out", str(out / f"{name}.csv"), "--overwrite"])
    for cell in sorted((out / "slopes" / "cells").iterdir()):
        for kind in ("slope-landing", "trajectory"):
            main(["plot", str(cell / "log.csv"), "--kind", kind, "--overwrite"])
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="results/slopes", type=Path)
    sys.exit(run(ap.parse_args().out))
