"""INI scenario files: ``[vehicle] [terrain] [controller] [pid] [model] [sim] [sweep]``.

Angles are degrees and divergences rad/s in files; everything is radians
inside the package. Configs are handled as nested dicts of raw strings so a
snapshot written back to disk reproduces the run bit for bit.
"""
from __future__ import annotations

import configparser
import copy
import io
import itertools
import math
from importlib import resources
from pathlib import Path

from .control import ControllerConfig, PidConfig, PidGains
from .dynamics import Terrain, VehicleParams
from .errors import ConfigError
from .simulation import ScenarioConfig

SECTIONS = ("vehicle", "terrain", "controller", "pid", "model", "sim", "sweep")
_FLOATS = {
    "vehicle": ("m", "Ixx", "bc", "g"),
    "model": ("m", "Ixx", "bc", "g"),
    "terrain": ("alpha",),
    "controller": ("theta_star", "k1", "k2", "k3", "eps_y", "eps_phi", "nominal_h",
                   "u1_max", "u2_max", "tau_f"),
    "sim": ("h0", "Y0", "kick", "dt", "t_max", "touchdown_threshold"),
}
SWEEP_AXES = {"theta_star": ("controller", "theta_star"), "alpha": ("terrain", "alpha"),
              "controller": ("controller", "kind"),
              "drift_compensation": ("controller", "drift_compensation")}


def _parser():
    p = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    p.optionxform = str  # keys are case-sensitive (Ixx, Y0)
    return p


def parse_text(text: str, source: str = "<config>") -> dict:
    p = _parser()
    try:
        p.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(source, str(exc).replace("\n", " ")) from None
    raw = {}
    for section in p.sections():
        if section not in SECTIONS:
            raise ConfigError(section, f"unknown section; expected one of {SECTIONS}")
        raw[section] = dict(p[section])
    return raw


def default_text() -> str:
    return resources.files("flowland").joinpath("data/default.ini").read_text()


def load_raw(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    return parse_text(text, str(path))


def render(raw: dict) -> str:
    p = _parser()
    for section in SECTIONS:
        if section in raw:
            p[section] = raw[section]
    buf = io.StringIO()
    p.write(buf)
    return buf.getvalue()


def _float(raw, section, key, default=None):
    value = raw.get(section, {}).get(key)
    if value is None or value.strip() == "":
        return default
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"not a number: {value!r}") from None
    if math.isnan(out):
        raise ConfigError(f"{section}.{key}", "NaN is not allowed")
    return out


def _bool(raw, section, key, default):
    value = raw.get(section, {}).get(key)
    if value is None:
        return default
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{section}.{key}", f"not a boolean: {value!r}")


def _gains(raw, key, default: PidGains) -> PidGains:
    value = raw.get("pid", {}).get(key)
    if value is None:
        return default
    parts = [s for s in value.replace(",", " ").split() if s]
    if len(parts) not in (3, 4):
        raise ConfigError(f"pid.{key}", "expected 'kp, ki, kd[, i_limit]'")
    try:
        nums = [float(s) for s in parts]
    except ValueError:
        raise ConfigError(f"pid.{key}", f"not numeric: {value!r}") from None
    if len(nums) == 3:
        nums.append(default.i_limit)
    try:
        return PidGains(*nums)
    except ValueError as exc:
        raise ConfigError(f"pid.{key}", str(exc)) from None


def _check_keys(raw):
    known = dict(_FLOATS)
    known["controller"] = known["controller"] + ("kind", "effectiveness_mode", "drift_compensation")
    known["pid"] = ("thrust", "moment", "drift")
    known["sim"] = known["sim"] + ("name",)
    known["sweep"] = tuple(SWEEP_AXES)
    for section, values in raw.items():
        for key in values:
            if key not in known.get(section, ()):
                raise ConfigError(f"{section}.{key}", "unknown key")


def _vehicle(raw, section, base=None):
    base = base or VehicleParams()
    vals = {k: _float(raw, section, k, getattr(base, k)) for k in _FLOATS["vehicle"]}
    try:
        return VehicleParams(**vals)
    except ValueError as exc:
        name = str(exc).split()[0]
        raise ConfigError(f"{section}.{name}", str(exc)) from None


def scenario_from_raw(raw: dict) -> ScenarioConfig:
    _check_keys(raw)
    params = _vehicle(raw, "vehicle")
    model = _vehicle(raw, "model", params) if "model" in raw else None

    alpha_deg = _float(raw, "terrain", "alpha", 0.0)
    try:
        terrain = Terrain(math.radians(alpha_deg))
    except ValueError as exc:
        raise ConfigError("terrain.alpha", str(exc)) from None

    d = ControllerConfig()
    ctrl = {k: _float(raw, "controller", k, getattr(d, k)) for k in _FLOATS["controller"]}
    c = raw.get("controller", {})
    ctrl["effectiveness_mode"] = c.get("effectiveness_mode", d.effectiveness_mode).strip()
    ctrl["drift_compensation"] = _bool(raw, "controller", "drift_compensation", d.drift_compensation)
    try:
        controller = ControllerConfig(**ctrl)
    except ValueError as exc:
        field = next((k for k in ctrl if str(exc).startswith(k)), "controller")
        raise ConfigError(f"controller.{field}", str(exc)) from None

    dp = PidConfig()
    pid = PidConfig(_gains(raw, "thrust", dp.thrust), _gains(raw, "moment", dp.moment),
                    _gains(raw, "drift", dp.drift))

    ds = ScenarioConfig.__dataclass_fields__
    sim = {k: _float(raw, "sim", k, ds[k].default) for k in _FLOATS["sim"]}
    return ScenarioConfig(
        terrain=terrain,
        params=params,
        controller=controller,
        controller_kind=c.get("kind", "indi").strip().lower(),
        pid=pid,
        model=model,
        name=raw.get("sim", {}).get("name", "").strip(),
        **sim,
    )


def load_scenario(path) -> ScenarioConfig:
    return scenario_from_raw(load_raw(path))


def sweep_axes(raw: dict):
    """Ordered ``(axis, [values...])`` pairs from the ``[sweep]`` section."""
    axes = []
    for key, value in raw.get("sweep", {}).items():
        values = [v.strip() for v in value.replace(",", " ").split() if v.strip()]
        if not values:
            raise ConfigError(f"sweep.{key}", "empty axis")
        axes.append((key, values))
    if not axes:
        raise ConfigError("sweep", "no grid axes given")
    return axes


def expand_sweep(raw: dict):
    """Cross product of the sweep axes as a list of per-cell raw configs."""
    axes = sweep_axes(raw)
    base = {k: v for k, v in raw.items() if k != "sweep"}
    cells = []
    for combo in itertools.product(*(values for _, values in axes)):
        cell = copy.deepcopy(base)
        for (axis, _), value in zip(axes, combo):
            section, key = SWEEP_AXES[axis]
            cell.setdefault(section, {})[key] = value
        cells.append(cell)
    return cells
