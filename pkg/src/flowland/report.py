"""Comparison tables built from run and sweep artifact directories."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .logio import read_metrics

CONTROLLER_LABELS = {"indi": "INDI", "pid": "PID"}
SUMMARY_METRICS = ("rmse_y1", "rmse_y2", "phi_f", "Y_drift", "v_td", "decay_slope", "terminal")


@dataclass
class Table:
    title: str
    columns: list
    rows: list  # [(label, [value or None, ...]), ...]
    warnings: list = field(default_factory=list)
    row_header: str = "Controller"

    @property
    def shape(self):
        return len(self.rows), len(self.columns)


def _cell_text(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if not math.isfinite(value) else f"{value:.4g}"
    return str(value)


def render_text(table: Table) -> str:
    header = [table.row_header, *table.columns]
    body = [[label, *map(_cell_text, values)] for label, values in table.rows]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    line = lambda r: "  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths)))
    out = [table.title, line(header), "-" * (sum(widths) + 2 * (len(widths) - 1))]
    out += [line(r) for r in body]
    return "\n".join(out) + "\n"


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([table.row_header.lower(), *table.columns])
    for label, values in table.rows:
        w.writerow([label, *map(_cell_text, values)])
    return buf.getvalue()


def _num(text):
    return float(text)


def _fmt_axis(axis, value):
    if axis == "alpha":
        return f"{_num(value):g} deg"
    if axis == "theta_star":
        return f"{_num(value):g}"
    return value


def _find(cells, want):
    """Successful cell whose axis values match ``want``; ``None`` if absent."""
    hits = [c for c in cells if all(c["axes"].get(k) == v for k, v in want.items())]
    ok = [c for c in hits if c.get("metrics")]
    return ok[0] if ok else None


def _is_true(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _row_axis(axes):
    """Rows are controllers, or drift compensation on/off when only that varies."""
    if "controller" in axes:
        return "controller", axes["controller"]
    if len(axes.get("drift_compensation", ())) > 1:
        return "drift_compensation", axes["drift_compensation"]
    return None, [None]


def _row_label(axis, value):
    if axis == "controller":
        return CONTROLLER_LABELS.get(value, value)
    if axis == "drift_compensation":
        return "on" if _is_true(value) else "off"
    return "run"


def sweep_table(index: dict, cells: list) -> Table:
    """Setpoint layout (y1 RMSE per theta*) or slope layout (three metrics per slope).

    ``index`` is the ``sweep.json`` payload; each cell dict carries its axis
    values and, when it succeeded, its metrics. Axes that are neither rows nor
    columns are pinned to their first value (drift compensation to "on").
    """
    axes = dict((a, v) for a, v in index["axes"])
    row_axis, row_values = _row_axis(axes)
    slopes = axes.get("alpha", [])
    inclined = any(_num(a) != 0.0 for a in slopes)
    if inclined:
        col_axis, metrics = "alpha", ("rmse_y2", "phi_f", "Y_drift")
    elif axes.get("theta_star"):
        col_axis, metrics = "theta_star", ("rmse_y1",)
    else:
        raise ValueError("sweep has neither a theta_star nor a non-zero alpha axis")
    fixed = {}
    for axis, values in axes.items():
        if axis in (row_axis, col_axis):
            continue
        if axis == "drift_compensation":
            fixed[axis] = next((v for v in values if _is_true(v)), values[0])
        else:
            fixed[axis] = values[0]

    if inclined:
        columns = [f"{_fmt_axis('alpha', a)} {m}" for a in slopes for m in ("RMSE y2", "phi_f", "Y_drift")]
    else:
        columns = [f"theta*={_fmt_axis('theta_star', s)}" for s in axes["theta_star"]]
    rows, warnings = [], []
    for rv in row_values:
        values = []
        for cv in axes[col_axis]:
            want = {col_axis: cv, **fixed}
            if row_axis:
                want[row_axis] = rv
            cell = _find(cells, want)
            if cell is None:
                warnings.append("missing cell: " + " ".join(f"{k}={v}" for k, v in want.items()))
                values += [None] * len(metrics)
            else:
                values += [cell["metrics"].get(m) for m in metrics]
        rows.append((_row_label(row_axis, rv), values))
    if inclined:
        title = "Inclined terrain: RMSE of y2 (rad/s), final roll phi_f (deg), lateral drift Y_drift (m)"
    else:
        title = "Horizontal terrain: RMSE of theta* tracking (rad/s)"
    header = "Drift compensation" if row_axis == "drift_compensation" else "Controller"
    return Table(title, columns, rows, warnings, header)


def run_table(metrics: dict, label: str) -> Table:
    return Table("Single run", list(SUMMARY_METRICS), [(label, [metrics.get(k) for k in SUMMARY_METRICS])])


def load_sweep_cells(root: Path):
    index = json.loads((root / "sweep.json").read_text())
    cells = []
    for entry in index["cells"]:
        cell = dict(entry)
        path = root / "cells" / entry["id"] / "metrics.json"
        metrics = read_metrics(path) if path.exists() else None
        cell["metrics"] = metrics if entry.get("ok") and metrics else None
        cells.append(cell)
    return index, cells


def build_report(root) -> Table:
    """Table for a sweep directory (``sweep.json``) or a single run directory."""
    root = Path(root)
    if (root / "sweep.json").exists():
        index, cells = load_sweep_cells(root)
        return sweep_table(index, cells)
    if (root / "metrics.json").exists():
        metrics = read_metrics(root / "metrics.json")
        label = CONTROLLER_LABELS.get(metrics.get("controller", ""), metrics.get("controller", root.name))
        return run_table(metrics, label)
    raise FileNotFoundError(f"{root}: no sweep.json or metrics.json")
