"""``flowland`` command line: run, sweep, tune-pid, report, plot."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import shutil
import sys
from pathlib import Path

from . import config as cfgmod
from . import svgplot
from .analysis import landing_metrics, tune_pid
from .errors import ConfigError, FlowlandError, TuningError
from .logio import metrics_payload, read_log_csv, write_log_csv, write_metrics
from .report import build_report, render_csv, render_text
from .simulation import run_scenario, run_sweep, scenario_ids

EXIT_OK = 0
EXIT_USAGE = 2  # argparse uses 2 as well
EXIT_CONFIG = 2
EXIT_SIM_FAILURE = 3
EXIT_ALL_FAILED = 4
EXIT_REFUSE_OVERWRITE = 5

OUTPUT_ROOT_ENV = "FLOWLAND_OUTPUT_ROOT"


def _err(msg):
    print(f"flowland: {msg}", file=sys.stderr)


def resolve_out(path) -> Path:
    """Relative output paths are placed under ``$FLOWLAND_OUTPUT_ROOT`` when set."""
    p = Path(path)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not p.is_absolute():
        p = Path(root) / p
    return p


def _prepare_dir(path: Path, overwrite: bool) -> bool:
    if path.exists() and (not path.is_dir() or any(path.iterdir())):
        if not overwrite:
            _err(f"{path} exists and is not empty; pass --overwrite to replace it")
            return False
        if path.is_dir():
            shutil.rmtree(path)
        else:
            path.unlink()
    path.mkdir(parents=True, exist_ok=True)
    return True


def _config_text(path) -> tuple[str, str]:
    if path is None:
        return cfgmod.default_text(), "<default>"
    try:
        return Path(path).read_text(), str(path)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None


def _write_run(out: Path, config_text: str, cfg, log) -> dict:
    (out / "config.ini").write_text(config_text)
    write_log_csv(log, out / "log.csv")
    extra = {"controller": cfg.controller_kind, "alpha_deg": round(math.degrees(cfg.terrain.alpha), 12),
             "theta_star": cfg.controller.theta_star}
    try:
        metrics = landing_metrics(log, cfg)
        payload = metrics_payload(metrics, log, extra)
    except FlowlandError as exc:
        payload = {"error": str(exc), "terminal_kind": log.terminal.kind, "rows": len(log), **extra}
    write_metrics(payload, out / "metrics.json")
    return payload


def cmd_run(args) -> int:
    try:
        text, source = _config_text(args.config)
        raw = cfgmod.parse_text(text, source)
        if "sweep" in raw:
            raise ConfigError("sweep", "run takes a single scenario; use 'flowland sweep'")
        cfg = cfgmod.scenario_from_raw(raw)
        cfg.validate()
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    out = resolve_out(args.out)
    if not _prepare_dir(out, args.overwrite):
        return EXIT_REFUSE_OVERWRITE
    log = run_scenario(cfg)
    payload = _write_run(out, text, cfg, log)
    term = log.terminal
    if term.kind != "touchdown":
        _err(f"simulation ended with {term.kind} at t={term.t:.3f}s {term.message}".rstrip())
        return EXIT_SIM_FAILURE
    print(f"touchdown at t={term.t:.3f}s  rmse_y1={payload['rmse_y1']:.5f}  "
          f"phi_f={payload['phi_f']:.2f} deg  Y_drift={payload['Y_drift']:.4f} m  -> {out}")
    return EXIT_OK


SUMMARY_FIELDS = ("id", "controller", "theta_star", "alpha_deg", "drift_compensation", "ok",
                  "rmse_y1", "rmse_y2", "phi_f", "Y_drift", "v_td", "decay_slope", "error")


def cmd_sweep(args) -> int:
    try:
        text, source = _config_text(args.config)
        raw = cfgmod.parse_text(text, source)
        axes = cfgmod.sweep_axes(raw)
        cell_raws = cfgmod.expand_sweep(raw)
        configs = []
        for sid, cell in zip(scenario_ids(len(cell_raws)), cell_raws):
            try:
                c = cfgmod.scenario_from_raw(cell)
                c.validate()
            except ConfigError as exc:
                raise ConfigError(f"{sid}:{exc.field}", exc.message) from None
            configs.append(c)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    out = resolve_out(args.out)
    if not _prepare_dir(out, args.overwrite):
        return EXIT_REFUSE_OVERWRITE
    (out / "config.ini").write_text(text)
    results = run_sweep(configs, jobs=args.jobs)
    entries, summary = [], []
    for cell, (sid, res) in zip(cell_raws, results.items()):
        cell_dir = out / "cells" / sid
        cell_dir.mkdir(parents=True)
        values = {axis: cell[cfgmod.SWEEP_AXES[axis][0]][cfgmod.SWEEP_AXES[axis][1]] for axis, _ in axes}
        if res.log is not None:
            payload = _write_run(cell_dir, cfgmod.render(cell), res.config, res.log)
        else:
            (cell_dir / "config.ini").write_text(cfgmod.render(cell))
            payload = {"error": res.error}
        entries.append({"id": sid, "axes": values, "ok": res.ok, "error": res.error})
        row = {"id": sid, "controller": res.config.controller_kind, "theta_star": res.config.controller.theta_star,
               "alpha_deg": payload.get("alpha_deg", ""), "drift_compensation": res.config.controller.drift_compensation,
               "ok": res.ok, "error": res.error}
        for k in ("rmse_y1", "rmse_y2", "phi_f", "Y_drift", "v_td", "decay_slope"):
            row[k] = payload.get(k, "")
        summary.append(row)
    (out / "sweep.json").write_text(json.dumps({"axes": axes, "cells": entries}, indent=2) + "\n")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, SUMMARY_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(summary)
    n_ok = sum(e["ok"] for e in entries)
    for e in entries:
        if not e["ok"]:
            _err(f"cell {e['id']} {e['axes']} failed: {e['error']}")
    print(f"{n_ok}/{len(entries)} cells landed -> {out}")
    return EXIT_OK if n_ok else EXIT_ALL_FAILED


def cmd_tune_pid(args) -> int:
    try:
        text, source = _config_text(args.config)
        raw = cfgmod.parse_text(text, source)
        raw.pop("sweep", None)
        base = cfgmod.scenario_from_raw(raw)
        base.validate()
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    try:
        pid, table = tune_pid(base, channel=args.channel, jobs=args.jobs)
    except TuningError as exc:
        _err(str(exc))
        return EXIT_ALL_FAILED
    metric = "rmse_y1" if args.channel == "thrust" else "rmse_y2"
    lines = ["kp,ki,kd," + metric]
    for (kp, ki, kd), score in table:
        lines.append(f"{kp:g},{ki:g},{kd:g}," + ("" if score is None else f"{score:.9g}"))
    g = getattr(pid, args.channel)
    tuned_line = f"{g.kp:g}, {g.ki:g}, {g.kd:g}, {g.i_limit:g}"
    print(f"best {args.channel} gains: {tuned_line}")
    if args.out:
        out = resolve_out(args.out)
        if not _prepare_dir(out, args.overwrite):
            return EXIT_REFUSE_OVERWRITE
        (out / "tuning.csv").write_text("\n".join(lines) + "\n")
        raw.setdefault("pid", {})[args.channel] = tuned_line
        (out / "tuned.ini").write_text(cfgmod.render(raw))
    else:
        print("\n".join(lines))
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        table = build_report(args.input)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    for w in table.warnings:
        _err(f"warning: {w}")
    print(render_text(table), end="")
    if args.out:
        out = resolve_out(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if out.exists() and not args.overwrite:
            _err(f"{out} exists; pass --overwrite to replace it")
            return EXIT_REFUSE_OVERWRITE
        out.write_text(render_csv(table))
    return EXIT_OK


def _plot_geometry(log_path: Path, config_path):
    path = Path(config_path) if config_path else log_path.parent / "config.ini"
    if not path.exists():
        return {}
    cfg = cfgmod.scenario_from_raw({k: v for k, v in cfgmod.load_raw(path).items() if k != "sweep"})
    return {"alpha": cfg.terrain.alpha, "bc": cfg.params.bc}


def cmd_plot(args) -> int:
    log_path = Path(args.log)
    try:
        cols = read_log_csv(log_path)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    kwargs = {}
    if args.kind == "trajectory":
        try:
            kwargs = _plot_geometry(log_path, args.config)
        except ConfigError as exc:
            _err(f"config error: {exc}")
            return EXIT_CONFIG
        kwargs["interval"] = args.interval
    try:
        svg = svgplot.render(args.kind, cols, **kwargs)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    out = resolve_out(args.out) if args.out else log_path.with_name(f"{args.kind}.svg")
    if out.exists() and not args.overwrite:
        _err(f"{out} exists; pass --overwrite to replace it")
        return EXIT_REFUSE_OVERWRITE
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg)
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flowland", description="Divergence-based landing simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--config", help="scenario INI file (default: the shipped canonical config)")
        sp.add_argument("--out", required=out_required, help=f"output path; relative paths honour ${OUTPUT_ROOT_ENV}")
        sp.add_argument("--overwrite", action="store_true", help="replace existing output")

    sp = sub.add_parser("run", help="simulate one landing")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run the cross product of the [sweep] axes")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("tune-pid", help="grid-search one PID channel")
    common(sp, out_required=False)
    sp.add_argument("--channel", choices=("thrust", "moment"), default="thrust")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_tune_pid)

    sp = sub.add_parser("report", help="render comparison tables from a run or sweep directory")
    sp.add_argument("input")
    sp.add_argument("--out", help="also write the table as CSV here")
    sp.add_argument("--overwrite", action="store_true")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("plot", help="render a log CSV as SVG")
    sp.add_argument("log")
    sp.add_argument("--kind", required=True, choices=svgplot.KINDS)
    sp.add_argument("--out", help="SVG path (default: <kind>.svg next to the log)")
    sp.add_argument("--config", help="config for terrain and arm length (default: config.ini next to the log)")
    sp.add_argument("--interval", type=float, default=0.5, help="trajectory snapshot spacing in seconds")
    sp.add_argument("--overwrite", action="store_true")
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        _err("--jobs must be at least 1")
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
