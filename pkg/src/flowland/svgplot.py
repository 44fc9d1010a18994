"""Plain SVG figures for landing logs; no plotting dependency."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PANEL_W, PANEL_H = 260, 200
MARGIN = 45
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
KINDS = ("timeseries", "slope-landing", "trajectory")


def _range(v, frac=0.05):
    v = np.asarray(v, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return -1.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        pad = max(abs(hi) * 0.05, 1e-3)
        return lo - pad, hi + pad
    pad = frac * (hi - lo)
    return lo - pad, hi + pad


def _polyline(x, y, sx, sy, color, width=1.5):
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def _decimate(x, y, max_points=1500):
    n = len(x)
    if n <= max_points:
        return x, y
    idx = np.unique(np.linspace(0, n - 1, max_points).astype(int))
    return np.asarray(x)[idx], np.asarray(y)[idx]


def panel(x, series, ox, oy, title, xlabel="t (s)", w=PANEL_W, h=PANEL_H, equal=False, extra=(),
          bounds=None):
    """One framed chart at ``(ox, oy)``; ``series`` is ``[(label, y), ...]``.

    ``bounds`` widens the axes to include ``(xs, ys)`` points that are drawn
    by ``extra`` callbacks rather than as series.
    """
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series])
    xs = np.asarray(x, dtype=float)
    if bounds is not None:
        xs = np.concatenate([xs, bounds[0]])
        ys = np.concatenate([ys, bounds[1]])
    xlo, xhi = _range(xs, 0.05 if equal else 0.0)
    ylo, yhi = _range(ys)
    if equal:
        span = max(xhi - xlo, yhi - ylo)
        xc, yc = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
        xlo, xhi, ylo, yhi = xc - span / 2, xc + span / 2, yc - span / 2, yc + span / 2

    def sx(v):
        return ox + MARGIN + (v - xlo) / (xhi - xlo) * (w - MARGIN - 10)

    def sy(v):
        return oy + h - MARGIN + (v - ylo) / (yhi - ylo) * -(h - MARGIN - 20)

    clip = f"clip{ox}_{oy}"
    frame = f'x="{ox + MARGIN}" y="{oy + 20}" width="{w - MARGIN - 10}" height="{h - MARGIN - 20}"'
    out = [f'<g class="panel" data-title="{escape(title)}">',
           f'<clipPath id="{clip}"><rect {frame}/></clipPath>',
           f'<rect {frame} fill="white" stroke="#444"/>',
           f'<text x="{ox + w / 2:.1f}" y="{oy + 14}" text-anchor="middle" font-size="12">{escape(title)}</text>',
           f'<text x="{ox + w / 2:.1f}" y="{oy + h - 8}" text-anchor="middle" font-size="10">{escape(xlabel)}</text>']
    for val, anchor in ((ylo, oy + h - MARGIN), (yhi, oy + 28)):
        out.append(f'<text x="{ox + MARGIN - 3}" y="{anchor:.1f}" text-anchor="end" font-size="9">{val:.3g}</text>')
    for val in (xlo, xhi):
        out.append(f'<text x="{sx(val):.1f}" y="{oy + h - MARGIN + 12}" text-anchor="middle" font-size="9">{val:.3g}</text>')
    out.append(f'<g clip-path="url(#{clip})">')
    for i, (label, y) in enumerate(series):
        xd, yd = _decimate(x, y)
        out.append(_polyline(xd, yd, sx, sy, COLORS[i % len(COLORS)]))
        if len(series) > 1:
            out.append(f'<text x="{ox + w - 14}" y="{oy + 34 + 11 * i}" text-anchor="end" font-size="9" '
                       f'fill="{COLORS[i % len(COLORS)]}">{escape(label)}</text>')
    for item in extra:
        out.append(item(sx, sy))
    out.append("</g>")
    out.append("</g>")
    return out


def _document(parts, width, height):
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        *parts,
        "</svg>",
        "",
    ])


def _grid(panels):
    parts = []
    for i, (x, series, title, kwargs) in enumerate(panels):
        parts += panel(x, series, i * PANEL_W, 0, title, **kwargs)
    return _document(parts, PANEL_W * len(panels), PANEL_H)


def _require(cols):
    if len(cols["t"]) == 0:
        raise ValueError("log is empty")


def timeseries_svg(cols) -> str:
    """Height, height rate, mean divergence and thrust against time."""
    _require(cols)
    t, h = cols["t"], cols["h"]
    hdot = np.gradient(h, t) if len(t) > 1 else np.zeros_like(h)
    return _grid([
        (t, [("h", h)], "height h (m)", {}),
        (t, [("hdot", hdot)], "vertical velocity dh/dt (m/s)", {}),
        (t, [("y1", cols["y1"])], "divergence y1 (1/s)", {}),
        (t, [("u1", cols["u1"])], "thrust u1 (N)", {}),
    ])


def slope_landing_svg(cols) -> str:
    _require(cols)
    t = cols["t"]
    return _grid([
        (t, [("h", cols["h"])], "height h (m)", {}),
        (t, [("phi", np.degrees(cols["phi"]))], "roll phi (deg)", {}),
        (t, [("y2", cols["y2"])], "divergence difference y2 (1/s)", {}),
        (t, [("u1", cols["u1"])], "thrust u1 (N)", {}),
        (t, [("u2", cols["u2"])], "moment u2 (N m)", {}),
    ])


def snapshot_indices(t, interval):
    """Row indices closest to multiples of ``interval`` seconds, plus the last row."""
    t = np.asarray(t, dtype=float)
    if interval <= 0:
        raise ValueError("snapshot interval must be positive")
    marks = np.arange(t[0], t[-1] + 1e-12, interval)
    idx = sorted({int(np.argmin(np.abs(t - m))) for m in marks} | {len(t) - 1})
    return idx


def trajectory_svg(cols, alpha=0.0, bc=0.2, interval=0.5) -> str:
    """Path in the Y-Z plane with the vehicle body drawn every ``interval`` s."""
    _require(cols)
    Y, Z, phi = cols["Y"], cols["Z"], cols["phi"]
    idx = snapshot_indices(cols["t"], interval)
    ta = math.tan(alpha)
    ylo, yhi = float(np.min(Y)) - 2 * bc, float(np.max(Y)) + 2 * bc

    def body(i):
        c, s = math.cos(phi[i]), math.sin(phi[i])
        return (Y[i] - bc * c, Z[i] - bc * s), (Y[i] + bc * c, Z[i] + bc * s)

    def draw_terrain(sx, sy):
        return (f'<line class="terrain" x1="{sx(ylo):.2f}" y1="{sy(ylo * ta):.2f}" '
                f'x2="{sx(yhi):.2f}" y2="{sy(yhi * ta):.2f}" stroke="#8c564b" stroke-width="2"/>')

    def draw_snapshots(sx, sy):
        out = []
        for i in idx:
            (a, b), (c, d) = body(i)
            out.append(f'<line class="snapshot" x1="{sx(a):.2f}" y1="{sy(b):.2f}" x2="{sx(c):.2f}" '
                       f'y2="{sy(d):.2f}" stroke="#333" stroke-width="2"/>')
        return "\n".join(out)

    terrain_pts = ([ylo, yhi], [ylo * ta, yhi * ta])
    parts = panel(Y, [("path", Z)], 0, 0, "trajectory (Z vs Y)", xlabel="Y (m)", w=2 * PANEL_H,
                  h=2 * PANEL_H, equal=True, extra=(draw_terrain, draw_snapshots), bounds=terrain_pts)
    return _document(parts, 2 * PANEL_H, 2 * PANEL_H)


def render(kind, cols, **kwargs) -> str:
    if kind == "timeseries":
        return timeseries_svg(cols)
    if kind == "slope-landing":
        return slope_landing_svg(cols)
    if kind == "trajectory":
        return trajectory_svg(cols, **kwargs)
    raise ValueError(f"unknown plot kind {kind!r}; expected one of {KINDS}")
