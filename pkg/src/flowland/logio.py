"""Log CSV and metrics serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .simulation import LOG_COLUMNS

CSV_SCHEMA_VERSION = 1
HEADER = ",".join(LOG_COLUMNS)


def _fmt(x) -> str:
    return x if isinstance(x, str) else f"{x:.9g}"


def log_to_csv(log) -> str:
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    for row in log.rows:
        buf.write(",".join(map(_fmt, row)))
        buf.write("\n")
    return buf.getvalue()


def write_log_csv(log, path) -> None:
    Path(path).write_text(log_to_csv(log))


def read_log_csv(path) -> dict:
    """Columns of a log CSV as numpy arrays (``phase`` stays a list of str)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if tuple(header) != LOG_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = list(reader)
    cols = {}
    for i, name in enumerate(LOG_COLUMNS):
        values = [r[i] for r in rows]
        cols[name] = values if name == "phase" else np.array(values, dtype=float)
    return cols


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def metrics_payload(metrics, log, extra=None) -> dict:
    out = {k: _clean(v) for k, v in metrics.as_dict().items()}
    term = log.terminal
    out["terminal_t"] = term.t
    out["terminal_message"] = term.message
    out["rows"] = len(log)
    out["log_schema_version"] = CSV_SCHEMA_VERSION
    out["roll_activation_t"] = None if log.roll_activation is None else log.roll_activation * log.dt
    if extra:
        out.update(extra)
    return out


def write_metrics(payload: dict, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_metrics(path) -> dict:
    return json.loads(Path(path).read_text())
