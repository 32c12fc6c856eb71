"""Two-dimensional slices of a construction's scalar, rendered as SVG and CSV."""
from __future__ import annotations

import io
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .chart import Chart
from .constructions import _x, omega_tw, tube_chart, xi0
from .contact import Region, contact_coefficient, scan
from .errors import BadSlice, UnknownConstruction
from .scalar import ScalarExpr

__all__ = ["PlotSpec", "SliceResult", "plot_spec", "render_slice", "parse_fix", "PLOTTABLE",
           "CANVAS"]

CANVAS = 800
MARGIN = 60
POS_FILL = "#9ecae1"
NEG_FILL = "#fc9272"
ZERO_FILL = "#ffffff"


@dataclass
class PlotSpec:
    name: str
    chart: Chart
    expr: ScalarExpr
    ranges: dict[str, tuple[float, float]]
    constraints: list[ScalarExpr] = field(default_factory=list)
    label: str = "value"
    tol: float = 1e-9


@dataclass
class SliceResult:
    svg: str
    csv: str
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    inside: np.ndarray
    locus: list[tuple[float, float]]


def _tube_spec(name: str, n: int, form) -> PlotSpec:
    ch = tube_chart(n)
    R = math.sqrt(math.pi)
    return PlotSpec(name, ch, contact_coefficient(form(ch)),
                    {f"r{i}": (0.0, R) for i in range(1, n + 1)}, label="contact coefficient")


def _giroux_spec(n: int) -> PlotSpec:
    # tube picture: r_i^2 = s_i + pi, so the domain is pi/2 <= r_i^2 <= 3 pi/2
    ch = tube_chart(n)
    half_pi = Fraction(math.pi / 2).limit_denominator(10 ** 12)
    cons = []
    for i in range(1, n + 1):
        r2 = _x(ch.index(f"r{i}"), 2)
        cons += [r2 - half_pi, ScalarExpr.const(3 * half_pi) - r2]
    spec = _tube_spec("giroux-domain", n, omega_tw)
    spec.constraints = cons
    spec.ranges = {f"r{i}": (0.0, math.sqrt(2 * math.pi)) for i in range(1, n + 1)}
    return spec


def _handle_spec(m: int) -> PlotSpec:
    from .handles import handle_region, make_handle
    hr = handle_region(make_handle(m, 1))
    ch = hr.handle.chart
    lower, upper = hr.constraints()
    return PlotSpec("round-handle", ch, upper,
                    {nm: (-2.0, 2.0) for nm in ch.names if nm != "phi"},
                    constraints=[lower], label="c - g_k")


PLOTTABLE = {
    "standard-tube": lambda n: _tube_spec("standard-tube", n, xi0),
    "lutz-confoliation": lambda n: _tube_spec("lutz-confoliation", n, omega_tw),
    "blob": lambda n: _tube_spec("blob", n, omega_tw),
    "double": lambda n: _tube_spec("double", n, omega_tw),
    "euler-sections": lambda n: _tube_spec("euler-sections", n, omega_tw),
    "giroux-domain": _giroux_spec,
    "round-handle": _handle_spec,
}


def plot_spec(name: str, n: int) -> PlotSpec:
    if name not in PLOTTABLE:
        raise UnknownConstruction(f"no plot for {name!r}; plottable: {', '.join(sorted(PLOTTABLE))}")
    return PLOTTABLE[name](n)


def parse_fix(text: str | None) -> dict[str, float]:
    """``"r2=1.5,theta1=0"`` to a dict; raises BadSlice on malformed entries."""
    out: dict[str, float] = {}
    if not text:
        return out
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise BadSlice(f"expected coord=value, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        try:
            out[k] = float(v)
        except ValueError:
            raise BadSlice(f"value for {k!r} is not a number: {v!r}") from None
    return out


def _validate(spec: PlotSpec, fix: Mapping[str, float], axes: Sequence[str]) -> tuple[int, int]:
    ch = spec.chart
    if len(axes) != 2 or axes[0] == axes[1]:
        raise BadSlice(f"need two distinct axes, got {list(axes)}")
    for a in list(axes) + list(fix):
        if a not in ch.names:
            raise BadSlice(f"unknown coordinate {a!r}; chart is {ch}")
    clash = set(axes) & set(fix)
    if clash:
        raise BadSlice(f"{sorted(clash)} both fixed and plotted")
    for k, v in fix.items():
        if not ch.kind(ch.index(k)).contains(v):
            raise BadSlice(f"{k}={v} outside its {ch.kind(ch.index(k)).tag} range")
    used = spec.expr.coords_used().union(*(c.coords_used() for c in spec.constraints))
    free = {ch.names[i] for i in used} - set(fix) - set(axes)
    if free:
        raise BadSlice(f"slice leaves {sorted(free)} free; fix them with --fix")
    return ch.index(axes[0]), ch.index(axes[1])


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def render_slice(spec: PlotSpec, fix: Mapping[str, float], axes: Sequence[str], *,
                 resolution: int = 81, profiles=None) -> SliceResult:
    ia, ib = _validate(spec, fix, axes)
    ch = spec.chart
    (xa, xb), (ya, yb) = (spec.ranges.get(axes[0], ch.kind(ia).default_range()),
                          spec.ranges.get(axes[1], ch.kind(ib).default_range()))
    xs = np.linspace(xa, xb, resolution)
    ys = np.linspace(ya, yb, resolution)
    base = np.zeros(ch.dim)
    for i in range(ch.dim):
        lo, hi = ch.kind(i).default_range()
        base[i] = lo if ch.kind(i).tag == "radial" else 0.5 * (lo + hi) if ch.kind(i).tag == "bounded" else 0.0
    for k, v in fix.items():
        base[ch.index(k)] = v
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    pts = np.tile(base, (X.size, 1))
    pts[:, ia] = X.ravel()
    pts[:, ib] = Y.ravel()
    vals, pole = kernels.eval_grid([spec.expr] + spec.constraints, pts, profiles, dim=ch.dim)
    values = vals[:, 0]
    inside = ~pole
    if spec.constraints:
        inside &= np.all(vals[:, 1:] >= -1e-12, axis=1)
    locus = _locus(spec, base, ia, ib, (xa, xb), (ya, yb), resolution, profiles) if inside.any() else []
    return SliceResult(_svg(spec, axes, xs, ys, values, inside, locus, fix), _csv(pts[:, ia], pts[:, ib], values, inside),
                       xs, ys, values, inside, locus)


def _locus(spec, base, ia, ib, xr, yr, resolution, profiles) -> list[tuple[float, float]]:
    ch = spec.chart
    bounds = {i: (float(base[i]), float(base[i])) for i in range(ch.dim)}
    bounds[ia], bounds[ib] = xr, yr
    region = Region(ch, bounds, constraints=spec.constraints, resolution=resolution, angle_resolution=resolution)
    try:
        sc = scan(spec.expr, region, tol=spec.tol, profiles=profiles, extra_active=(ia, ib))
    except ValueError:
        return []
    cell = max(region.cell(ia), region.cell(ib))
    out: list[tuple[float, float]] = []
    for z in sorted(sc.zeros):
        p = (z[ia], z[ib])
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) > cell for q in out):
            out.append(p)
    return [(round(a, 9), round(b, 9)) for a, b in out]


def _csv(x, y, values, inside) -> str:
    buf = io.StringIO()
    buf.write("x,y,value\n")
    for a, b, v, ok in zip(x, y, values, inside):
        if ok:
            buf.write(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}\n")
    return buf.getvalue()


def _svg(spec, axes, xs, ys, values, inside, locus, fix) -> str:
    w = CANVAS - 2 * MARGIN
    nx, ny = len(xs), len(ys)
    x0, x1, y0, y1 = xs[0], xs[-1], ys[0], ys[-1]
    sx = lambda x: MARGIN + (x - x0) / (x1 - x0) * w  # noqa: E731
    sy = lambda y: MARGIN + w - (y - y0) / (y1 - y0) * w  # noqa: E731
    cw, chh = w / nx, w / ny
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
           f'viewBox="0 0 {CANVAS} {CANVAS}">',
           f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="#ffffff"/>']
    title = f"{spec.name}: sign of {spec.label}"
    if fix:
        title += " at " + ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(fix.items()))
    out.append(f'<text x="{CANVAS / 2:.1f}" y="30" text-anchor="middle" font-size="16">{title}</text>')
    out.append('<g stroke="none">')
    grid_v = values.reshape(ny, nx)
    grid_in = inside.reshape(ny, nx)
    for j in range(ny):
        for i in range(nx):
            if not grid_in[j, i]:
                continue
            v = grid_v[j, i]
            fill = ZERO_FILL if abs(v) <= spec.tol else POS_FILL if v > 0 else NEG_FILL
            cx, cy = sx(xs[i]) - cw / 2, sy(ys[j]) - chh / 2
            out.append(f'<rect x="{cx:.2f}" y="{cy:.2f}" width="{cw:.2f}" height="{chh:.2f}" fill="{fill}"/>')
    out.append("</g>")
    out.append(f'<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="#000000"/>')
    for k in range(5):
        fx = x0 + (x1 - x0) * k / 4
        fy = y0 + (y1 - y0) * k / 4
        out.append(f'<text x="{sx(fx):.1f}" y="{CANVAS - MARGIN + 20}" text-anchor="middle" '
                   f'font-size="12">{fx:.3f}</text>')
        out.append(f'<text x="{MARGIN - 8}" y="{sy(fy) + 4:.1f}" text-anchor="end" font-size="12">{fy:.3f}</text>')
    out.append(f'<text x="{CANVAS / 2:.1f}" y="{CANVAS - 15}" text-anchor="middle" font-size="14">{axes[0]}</text>')
    out.append(f'<text x="20" y="{CANVAS / 2:.1f}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 20 {CANVAS / 2:.1f})">{axes[1]}</text>')
    for a, b in locus:
        out.append(f'<circle class="locus" cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="5" fill="#d62728"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
