"""Grid certification of contact-type conditions.

Every numeric claim is made on a :class:`Region` grid.  Because isolated
zeros of smooth coefficients almost never sit on grid nodes, scans refine
each node that could hide a zero inside its cell (a second-order Taylor
bound decides) by a bounded local minimisation, followed by bisection when
a sign change is found.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .chart import Chart
from .errors import (BadBlendRange, MaxStepsExceeded, NotTransverse, PathEscapedRegion,
                     VanishingForm, ZeroVolume)
from .forms import (DiagonalMetric, DifferentialForm, VectorField, ext_d, hodge_star,
                    interior, restrict, top_ratio, wedge, wedge_power)
from .scalar import (DEFAULT_SEED, Exact, ScalarExpr, coord, differentiate, evaluate,
                     is_zero, to_text)

__all__ = [
    "POSITIVITY_TOL", "LOCUS_TOL", "ARRIVAL_TOL", "Region", "CertificateKind", "Certificate",
    "ContactClass", "Classification", "GridScan", "scan", "contact_coefficient",
    "default_volume", "classify", "non_contact_locus", "LocusReport", "tau",
    "conductivity_check", "ConductivityReport", "char_foliation", "dividing_set",
    "DividingReport", "blend", "radial_field",
]

POSITIVITY_TOL = 1e-9
LOCUS_TOL = 1e-9
ARRIVAL_TOL = 1e-6
RK4_STEP = 1e-3
RK4_MAX_STEPS = 10_000
NULL_PAIRING_TOL = 1e-6
NULL_SAMPLES = 16
AXIS_EPS = 1e-4


# --------------------------------------------------------------------------
# regions

class Region:
    """Box plus inequality constraints ``c(x) >= 0`` with a deterministic grid."""

    def __init__(self, chart: Chart, bounds: Mapping[int | str, tuple[float, float]] | None = None,
                 constraints: Sequence[ScalarExpr] = (), resolution: int = 25,
                 angle_resolution: int = 8, seed: int = DEFAULT_SEED, jitter: float = 0.0,
                 name: str = ""):
        self.chart = chart
        self.name = name
        box = [list(chart.kind(i).default_range()) for i in range(chart.dim)]
        for key, (lo, hi) in (bounds or {}).items():
            i = chart.resolve(key)
            lo, hi = float(lo), float(hi)
            kind = chart.kind(i)
            if lo > hi or not (kind.contains(lo) and kind.contains(hi)):
                raise ValueError(f"bounds {lo, hi} invalid for {chart.names[i]}")
            box[i] = [lo, hi]
        self.box = [tuple(b) for b in box]
        self.constraints = tuple(constraints)
        self.resolution = int(resolution)
        self.angle_resolution = int(angle_resolution)
        self.seed = seed
        self.jitter = float(jitter)

    def with_bounds(self, **bounds) -> "Region":
        merged = {i: b for i, b in enumerate(self.box)}
        for k, v in bounds.items():
            merged[self.chart.index(k)] = v
        return Region(self.chart, merged, self.constraints, self.resolution,
                      self.angle_resolution, self.seed, self.jitter, self.name)

    def axis(self, i: int) -> np.ndarray:
        lo, hi = self.box[i]
        if lo == hi:
            return np.array([lo])
        if self.chart.kind(i).tag == "angle":
            full = math.isclose(hi - lo, 2 * math.pi)
            return np.linspace(lo, hi, self.angle_resolution, endpoint=not full)
        return np.linspace(lo, hi, self.resolution)

    def cell(self, i: int) -> float:
        ax = self.axis(i)
        return float(ax[1] - ax[0]) if len(ax) > 1 else 0.0

    def representative(self, i: int) -> float:
        ax = self.axis(i)
        return float(ax[len(ax) // 2])

    def grid(self, active: Iterable[int] | None = None) -> np.ndarray:
        """Grid nodes; coordinates outside ``active`` are pinned to one value."""
        active = set(range(self.chart.dim)) if active is None else set(active)
        active |= {i for c in self.constraints for i in c.coords_used()}
        axes = [self.axis(i) if i in active else np.array([self.representative(i)])
                for i in range(self.chart.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1) if axes else np.zeros((1, 0))
        if self.jitter:
            rng = np.random.default_rng(self.seed)
            cells = np.array([self.cell(i) if i in active else 0.0 for i in range(self.chart.dim)])
            pts = pts + rng.uniform(-self.jitter, self.jitter, pts.shape) * cells
            lo = np.array([b[0] for b in self.box])
            hi = np.array([b[1] for b in self.box])
            pts = np.clip(pts, lo, hi)
        if self.constraints:
            vals, _ = kernels.eval_grid(self.constraints, pts, dim=self.chart.dim)
            pts = pts[np.all(vals >= -1e-12, axis=1)]
        return pts

    def contains(self, point: Sequence[float], tol: float = 1e-12) -> bool:
        for (lo, hi), x in zip(self.box, point):
            if x < lo - tol or x > hi + tol:
                return False
        return all(evaluate(c, point) >= -tol for c in self.constraints)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "box": {n: [lo, hi] for n, (lo, hi) in zip(self.chart.names, self.box)},
            "constraints": [to_text(c, self.chart.names) for c in self.constraints],
            "resolution": self.resolution,
            "angle_resolution": self.angle_resolution,
        }


# --------------------------------------------------------------------------
# certificates

class CertificateKind(enum.Enum):
    SYMBOLIC_IDENTITY = "SymbolicIdentity"
    GRID_POSITIVE = "GridPositive"
    GRID_NONNEGATIVE = "GridNonNegative"
    GRID_ZERO_SET = "GridZeroSet"
    PATH_TRACE = "PathTrace"


@dataclass
class Certificate:
    kind: CertificateKind
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "payload": self.payload}


@dataclass
class GridScan:
    points: np.ndarray
    values: np.ndarray
    min_value: float
    min_point: tuple
    max_value: float
    zeros: list[tuple]
    n_poles: int
    tol: float

    @property
    def n_samples(self) -> int:
        return len(self.values)

    def summary(self) -> dict:
        return {
            "samples": int(self.n_samples),
            "poles_skipped": int(self.n_poles),
            "min": _num(self.min_value),
            "argmin": [_num(x) for x in self.min_point],
            "max": _num(self.max_value),
            "zeros": len(self.zeros),
            "tolerance": self.tol,
        }


def _num(x: float, digits: int = 12) -> float:
    """Round for reports so byte-identical output does not hinge on the last ulp."""
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def _refine(ev: kernels.BatchEvaluator, free: list[int], nodes: np.ndarray, vals: np.ndarray,
            region: Region, tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched damped-Newton minimisation of ``sign(v) * expr`` inside each node's cell.

    ``ev`` evaluates ``[expr, gradient..., upper Hessian...]`` over ``free``.
    Returns ``(final points, final signed values, zero mask)``; where the
    minimum crosses zero the crossing is located by bisection.
    """
    m = len(free)
    iu = [(a, b) for a in range(m) for b in range(a, m)]
    s = np.where(vals >= 0, 1.0, -1.0)
    cells = np.array([region.cell(i) for i in free])
    box_lo = np.array([region.box[i][0] for i in free])
    box_hi = np.array([region.box[i][1] for i in free])
    lo = np.maximum(box_lo, nodes[:, free] - cells)
    hi = np.minimum(box_hi, nodes[:, free] + cells)

    def at(y):
        x = nodes.copy()
        x[:, free] = y
        out, pole = ev(x)
        out = np.where(pole[:, None], np.nan, out)
        f = s * out[:, 0]
        g = s[:, None] * out[:, 1:1 + m]
        h = np.empty((len(y), m, m))
        for k, (a, b) in enumerate(iu):
            h[:, a, b] = h[:, b, a] = s * out[:, 1 + m + k]
        return f, g, h

    y = nodes[:, free].copy()
    f, g, h = at(y)
    lam = np.full(len(y), 1e-3)
    eye = np.eye(m)
    for _ in range(80):
        active = f > tol
        if not active.any():
            break
        scale = np.abs(np.diagonal(h, axis1=1, axis2=2)).max(axis=1) + 1e-12
        mat = h + (lam * scale)[:, None, None] * eye
        try:
            step = np.linalg.solve(mat, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = g / scale[:, None]
        bad = ~np.all(np.isfinite(step), axis=1)
        step[bad] = (g / scale[:, None])[bad]
        y_new = np.clip(y - step, lo, hi)
        f_new, g_new, h_new = at(y_new)
        ok = active & np.isfinite(f_new) & (f_new < f)
        y[ok], f[ok], g[ok], h[ok] = y_new[ok], f_new[ok], g_new[ok], h_new[ok]
        lam = np.where(ok, lam / 3.0, np.minimum(lam * 4.0, 1e12))
    zero = np.abs(f) <= tol
    cross = np.nonzero(f < -tol)[0]
    if len(cross):
        a = nodes[cross][:, free].copy()
        b = y[cross].copy()
        sub = s[cross]
        for _ in range(120):
            mid = 0.5 * (a + b)
            x = nodes[cross].copy()
            x[:, free] = mid
            fm = sub * ev(x)[0][:, 0]
            left = fm > 0
            a[left] = mid[left]
            b[~left] = mid[~left]
        y[cross] = b
        x = nodes[cross].copy()
        x[:, free] = b
        fb = ev(x)[0][:, 0]
        zero[cross] = np.abs(fb) <= tol
        f[cross] = np.where(zero[cross], sub * fb, f[cross])
    x = nodes.copy()
    x[:, free] = y
    return x, s * f, zero


def scan(expr: ScalarExpr, region: Region, *, tol: float = LOCUS_TOL, refine: bool = True,
         profiles=None, extra_active: Iterable[int] = ()) -> GridScan:
    """Evaluate ``expr`` on the region grid and refine possible zeros."""
    dim = region.chart.dim
    active = sorted(expr.coords_used() | set(extra_active))
    pts = region.grid(active)
    vals, pole = kernels.eval_grid([expr], pts, profiles, dim=dim)
    vals = vals[:, 0]
    keep = ~pole
    pts, vals = pts[keep], vals[keep]
    if not len(vals):
        raise ValueError(f"region {region.name!r} has no pole-free samples")
    zeros: list[tuple] = [tuple(map(float, p)) for p in pts[np.abs(vals) <= tol]]
    mins = [(float(v), tuple(map(float, p))) for v, p in [(vals.min(), pts[vals.argmin()])]]
    free = [i for i in active if region.cell(i) > 0]
    if refine and free:
        grads = [differentiate(expr, i) for i in free]
        hess = [differentiate(g, j) for a, g in zip(free, grads) for j in free if j >= a]
        gh, _ = kernels.eval_grid(grads + hess, pts, profiles, dim=dim)
        gnorm = np.linalg.norm(gh[:, :len(free)], axis=1)
        hnorm = np.linalg.norm(gh[:, len(free):], axis=1) * math.sqrt(2.0)
        diag = math.sqrt(sum(region.cell(i) ** 2 for i in free))
        bound = 4.0 * (gnorm * diag + 0.5 * hnorm * diag * diag) + tol
        cand = np.nonzero((np.abs(vals) <= bound) & (np.abs(vals) > tol))[0]
        if len(cand):
            ev = kernels.BatchEvaluator([expr] + grads + hess, dim, profiles)
            xs, fs, zmask = _refine(ev, free, pts[cand], vals[cand], region, tol)
            inside = np.array([region.contains(x) for x in xs])
            for x, f, z in zip(xs[zmask & inside], fs[zmask & inside], zmask[zmask & inside]):
                zeros.append(tuple(map(float, x)))
                mins.append((float(f), tuple(map(float, x))))
            rest = np.nonzero(~zmask & inside & np.isfinite(fs))[0]
            if len(rest):
                k = rest[np.argmin(fs[rest])]
                mins.append((float(fs[k]), tuple(map(float, xs[k]))))
    vmin, pmin = min(mins, key=lambda t: t[0])
    return GridScan(pts, vals, vmin, pmin, float(vals.max()), zeros, int(pole.sum()), tol)


# --------------------------------------------------------------------------
# classification

class ContactClass(enum.Enum):
    CONTACT = "Contact"
    CONFOLIATION = "Confoliation"
    NEITHER = "Neither"


@dataclass
class Classification:
    kind: ContactClass
    certificate: Certificate
    coefficient: ScalarExpr
    scan: GridScan

    def to_json(self) -> dict:
        return {"class": self.kind.value, "certificate": self.certificate.to_json(),
                "coefficient": to_text(self.coefficient)}


def default_volume(chart: Chart) -> DifferentialForm:
    """Coordinate volume times the cylindrical density (``r`` for each radius-angle pair)."""
    dens = DiagonalMetric.cylindrical(chart).volume_density()
    return DifferentialForm.basis(chart, *range(chart.dim)) * dens


def _half_dim(chart: Chart) -> int:
    if chart.dim % 2 == 0:
        raise ValueError(f"contact conditions need an odd-dimensional chart, got {chart.dim}")
    return (chart.dim - 1) // 2


def contact_coefficient(alpha: DifferentialForm, volume: DifferentialForm | None = None
                        ) -> ScalarExpr:
    """``f`` with ``alpha ^ (d alpha)^n = f * volume``."""
    if alpha.degree != 1:
        raise ValueError("expected a 1-form")
    n = _half_dim(alpha.chart)
    top = wedge(alpha, wedge_power(ext_d(alpha), n))
    return top_ratio(top, volume if volume is not None else default_volume(alpha.chart))


def _check_nonvanishing(alpha: DifferentialForm, region: Region, profiles) -> None:
    comps = list(alpha.components.values())
    if not comps:
        raise VanishingForm("the 1-form is identically zero")
    active = set().union(*(c.coords_used() for c in comps))
    pts = region.grid(active)
    vals, pole = kernels.eval_grid(comps, pts, profiles, dim=alpha.chart.dim)
    mags = np.max(np.abs(np.nan_to_num(vals, nan=1.0)), axis=1)
    bad = np.nonzero(mags <= 1e-12)[0]
    if len(bad):
        raise VanishingForm(f"the 1-form vanishes at {pts[bad[0]].tolist()}")


def classify(alpha: DifferentialForm, region: Region, volume: DifferentialForm | None = None,
             *, profiles=None, tol: float = POSITIVITY_TOL) -> Classification:
    if region.chart != alpha.chart:
        raise ValueError("region and form live on different charts")
    _check_nonvanishing(alpha, region, profiles)
    coef = contact_coefficient(alpha, volume)
    sc = scan(coef, region, tol=tol, profiles=profiles)
    payload = {"expression": to_text(coef, alpha.chart.names), **sc.summary()}
    if sc.min_value > tol:
        kind, cert = ContactClass.CONTACT, CertificateKind.GRID_POSITIVE
    elif sc.min_value >= -tol:
        kind, cert = ContactClass.CONFOLIATION, CertificateKind.GRID_NONNEGATIVE
    else:
        kind, cert = ContactClass.NEITHER, CertificateKind.GRID_NONNEGATIVE
        payload["negative_witness"] = [_num(x) for x in sc.min_point]
    if kind is not ContactClass.NEITHER and sc.min_value <= tol and not sc.zeros:
        sc.zeros.append(sc.min_point)
    return Classification(kind, Certificate(cert, payload), coef, sc)


# --------------------------------------------------------------------------
# locus

@dataclass
class LocusReport:
    zeros: list[tuple]
    strata: list[dict]
    zeros_matched: bool
    strata_covered: bool
    certificate: Certificate

    @property
    def matches(self) -> bool:
        return self.zeros_matched and self.strata_covered


def non_contact_locus(alpha: DifferentialForm, region: Region,
                      strata: Sequence[Mapping[int | str, float]] | None = None,
                      volume: DifferentialForm | None = None, *, profiles=None,
                      tol: float = LOCUS_TOL) -> LocusReport:
    """Grid zero set of the contact coefficient, optionally matched to strata.

    A zero matches a stratum when every fixed coordinate is within one grid
    cell.  A stratum is covered when each of its grid points (free
    coordinates on grid nodes) has a zero within one cell in every direction.
    """
    coef = contact_coefficient(alpha, volume)
    sc = scan(coef, region, tol=tol, profiles=profiles)
    chart = region.chart
    zeros = sorted(set(sc.zeros))
    active = sorted(coef.coords_used())
    cells = np.array([region.cell(i) for i in range(chart.dim)])
    slack = 1e-9
    strata_list = [{chart.resolve(k): float(v) for k, v in s.items()} for s in (strata or [])]
    zarr = np.array(zeros) if zeros else np.zeros((0, chart.dim))

    def near_stratum(z, s):
        return all(abs(z[i] - v) <= cells[i] + slack for i, v in s.items())

    matched = [any(near_stratum(z, s) for s in strata_list) for z in zeros]
    per_stratum = []
    for s in strata_list:
        free = [i for i in active if i not in s]
        if any(not region.box[i][0] - slack <= v <= region.box[i][1] + slack for i, v in s.items()):
            per_stratum.append({"stratum": s, "in_region": False, "grid_points": 0, "covered": 0})
            continue
        axes = [region.axis(i) for i in free]
        pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(free), -1).T \
            if free else np.zeros((1, 0))
        covered = 0
        for p in pts:
            q = np.array([region.representative(i) for i in range(chart.dim)])
            for i, v in s.items():
                q[i] = v
            q[free] = p
            if not region.contains(q):
                continue
            if len(zarr) and np.any(np.all(np.abs(zarr[:, active] - q[active]) <= cells[active] + slack,
                                           axis=1)):
                covered += 1
            else:
                covered -= 10 ** 9
        per_stratum.append({"stratum": {chart.names[i]: _num(v) for i, v in s.items()},
                            "in_region": True, "grid_points": int(len(pts)),
                            "covered": bool(covered >= 0)})
    zeros_ok = all(matched) if strata_list else not zeros
    strata_ok = all(p["covered"] for p in per_stratum if p["in_region"])
    payload = {"expression": to_text(coef, chart.names), **sc.summary(),
               "zero_points": [[_num(x, 10) for x in z] for z in zeros],
               "strata": per_stratum, "zeros_matched": zeros_ok, "strata_covered": strata_ok}
    return LocusReport(zeros, per_stratum, zeros_ok, strata_ok,
                       Certificate(CertificateKind.GRID_ZERO_SET, payload))


# --------------------------------------------------------------------------
# conductivity

def tau(alpha: DifferentialForm, g: DiagonalMetric, region_points=None) -> DifferentialForm:
    """``*(alpha ^ (d alpha)^(n-1))``."""
    n = _half_dim(alpha.chart)
    beta = wedge(alpha, wedge_power(ext_d(alpha), n - 1))
    return hodge_star(beta, g, region_points)


def radial_field(chart: Chart) -> VectorField:
    """``sum r_i d/dr_i`` over the radial coordinates."""
    return VectorField(chart, {i: ScalarExpr.atom(coord(i)) for i in range(chart.dim)
                               if chart.kind(i).tag == "radial"})


@dataclass
class ConductivityReport:
    paths: list[dict]
    all_arrived: bool
    max_steps_used: int
    null_checks: int
    null_violations: int
    certificate: Certificate


def _two_form_matrix(t: DifferentialForm, x, profiles) -> np.ndarray:
    d = t.chart.dim
    m = np.zeros((d, d))
    for (i, j), c in t.components.items():
        v = evaluate(c, x, profiles)
        m[i, j], m[j, i] = v, -v
    return m


def conductivity_check(alpha: DifferentialForm, region: Region, X: VectorField | None = None,
                       g: DiagonalMetric | None = None, *, starts: Sequence[Sequence[float]] | None = None,
                       flow_bounds: Mapping[int | str, tuple[float, float]] | None = None,
                       volume: DifferentialForm | None = None, profiles=None,
                       h: float = RK4_STEP, max_steps: int = RK4_MAX_STEPS,
                       thresh: float = ARRIVAL_TOL, null_samples: int = NULL_SAMPLES,
                       use_numba: bool | None = None) -> ConductivityReport:
    """Flow every locus point along ``X`` until the contact coefficient exceeds ``thresh``."""
    chart = alpha.chart
    X = X if X is not None else radial_field(chart)
    g = g if g is not None else DiagonalMetric.cylindrical(chart)
    coef = contact_coefficient(alpha, volume)
    if starts is None:
        starts = non_contact_locus(alpha, region, volume=volume, profiles=profiles).zeros
    box = [list(b) for b in region.box]
    for key, (lo, hi) in (flow_bounds or {}).items():
        box[chart.resolve(key)] = [lo, hi]
    lo = [b[0] for b in box]
    hi = [b[1] for b in box]
    field_exprs = [X[i] for i in range(chart.dim)]
    t = tau(alpha, g)
    radial = np.array([chart.kind(i).tag == "radial" for i in range(chart.dim)])
    paths, null_checks, violations, worst = [], 0, 0, 0
    for x0 in starts:
        code, steps, path = kernels.rk4_trace(field_exprs, coef, x0, lo, hi, h=h,
                                              max_steps=max_steps, thresh=thresh,
                                              profiles=profiles, use_numba=use_numba)
        if code == kernels.ESCAPED:
            raise PathEscapedRegion(f"flow from {list(x0)} left the region after {steps} steps")
        if code == kernels.EXHAUSTED:
            raise MaxStepsExceeded(f"flow from {list(x0)} did not reach the hot zone "
                                   f"in {max_steps} steps")
        if code == kernels.POLE:
            raise PathEscapedRegion(f"flow from {list(x0)} hit a pole after {steps} steps")
        worst = max(worst, steps)
        # sample the flow line inside the hot zone beyond the arrival point
        samples = _hot_samples(field_exprs, path[-1], h, null_samples, lo, hi, profiles)
        bad = 0
        for x in samples:
            null_checks += 1
            # metric checks stay off the axes, where the cylindrical metric degenerates
            x = np.where(radial & (x < AXIS_EPS), AXIS_EPS, x)
            if not _in_null_perp(t, X, g, x, profiles):
                bad += 1
        violations += bad
        paths.append({"start": [_num(v, 10) for v in x0], "steps": int(steps),
                      "arrival": [_num(v, 10) for v in path[-1]],
                      "coefficient_at_arrival": _num(evaluate(coef, path[-1], profiles)),
                      "null_perp_violations": bad})
    payload = {"step": h, "max_steps": max_steps, "threshold": thresh,
               "field": X.to_text(), "paths": paths, "max_steps_used": worst,
               "null_checks": null_checks, "null_violations": violations,
               "pairing_tolerance": NULL_PAIRING_TOL, "axis_exclusion": AXIS_EPS}
    return ConductivityReport(paths, True, worst, null_checks, violations,
                              Certificate(CertificateKind.PATH_TRACE, payload))


def _hot_samples(field_exprs, x, h, count, lo, hi, profiles) -> list[np.ndarray]:
    out = []
    x = np.asarray(x, dtype=float)
    stepper = kernels.BatchEvaluator(field_exprs, len(x), profiles)
    for _ in range(count):
        out.append(x.copy())
        k1 = stepper(x)[0][0]
        k2 = stepper(x + 0.5 * h * k1)[0][0]
        k3 = stepper(x + 0.5 * h * k2)[0][0]
        k4 = stepper(x + h * k3)[0][0]
        nxt = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.any(nxt < lo) or np.any(nxt > hi):
            break
        x = nxt
    return out


def _in_null_perp(t: DifferentialForm, X: VectorField, g: DiagonalMetric, x, profiles) -> bool:
    m = _two_form_matrix(t, x, profiles)
    xv = np.array(X.evaluate(x, profiles))
    gd = np.array([evaluate(e, x, profiles) for e in g.entries])
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        return not np.any(xv)
    _, s, vt = np.linalg.svd(m)
    null = vt[s <= 1e-9 * scale]
    xnorm = math.sqrt(float(np.sum(gd * xv * xv)))
    for n in null:
        nnorm = math.sqrt(float(np.sum(gd * n * n)))
        if abs(float(np.sum(gd * xv * n))) > NULL_PAIRING_TOL * max(xnorm * nnorm, 1e-300):
            return False
    return True


# --------------------------------------------------------------------------
# hypersurfaces

def char_foliation(alpha: DifferentialForm, level: Mapping[int | str, object],
                   omega: DifferentialForm) -> VectorField:
    """Solve ``V -| Omega = (alpha ^ (d alpha)^(n-1))|_Sigma`` on a coordinate level set."""
    if len(level) != 1:
        raise ValueError("the hypersurface must fix exactly one coordinate")
    n = _half_dim(alpha.chart)
    beta = restrict(wedge(alpha, wedge_power(ext_d(alpha), n - 1)), level)
    sub = beta.chart
    if omega.chart != sub or omega.degree != sub.dim:
        raise ValueError("Omega must be a top form on the hypersurface chart")
    w = omega.components.get(tuple(range(sub.dim)))
    if w is None or not w.terms:
        raise ZeroVolume("Omega is zero")
    try:
        winv = w.inverse()
    except ValueError:
        raise ZeroVolume(f"Omega density {to_text(w)} is not an invertible monomial") from None
    comps = {}
    for k in range(sub.dim):
        key = tuple(j for j in range(sub.dim) if j != k)
        b = beta.components.get(key)
        if b is not None:
            comps[k] = b * winv if k % 2 == 0 else -(b * winv)
    return VectorField(sub, comps)


@dataclass
class DividingReport:
    zeros: list[tuple]
    positive: int
    negative: int
    pairing: ScalarExpr
    certificate: Certificate


def dividing_set(level: Mapping[int | str, object], alpha: DifferentialForm, X: VectorField,
                 region: Region, *, profiles=None, tol: float = LOCUS_TOL) -> DividingReport:
    """Zeros of ``alpha(X)`` on the level set, with the sign split ``U+ / U-``.

    ``region`` lives on the ambient chart; its box along the fixed coordinate is
    replaced by the level value.
    """
    if len(level) != 1:
        raise ValueError("the hypersurface must fix exactly one coordinate")
    (key, val), = level.items()
    chart = alpha.chart
    i = chart.resolve(key)
    fixed = float(Exact.coerce(val)) if not isinstance(val, float) else val
    normal = X[i]
    sigma = region.with_bounds(**{chart.names[i]: (fixed, fixed)})
    pts = sigma.grid(normal.coords_used())
    if not normal.terms:
        raise NotTransverse(f"X has no d/d{chart.names[i]} component")
    nv, _ = kernels.eval_grid([normal], pts, profiles, dim=chart.dim)
    if np.any(np.abs(nv[:, 0]) <= 1e-12):
        bad = pts[np.argmin(np.abs(nv[:, 0]))]
        raise NotTransverse(f"X is tangent to the level set at {bad.tolist()}")
    pairing = interior(X, alpha).components.get((), ScalarExpr())
    sc = scan(pairing, sigma, tol=tol, profiles=profiles)
    pos = int(np.sum(sc.values > tol))
    neg = int(np.sum(sc.values < -tol))
    payload = {"pairing": to_text(pairing, chart.names), **sc.summary(),
               "U_plus": pos, "U_minus": neg}
    return DividingReport(sorted(set(sc.zeros)), pos, neg, pairing,
                          Certificate(CertificateKind.GRID_ZERO_SET, payload))


# --------------------------------------------------------------------------
# blending

def blend(alpha: DifferentialForm, omega: DifferentialForm, f: ScalarExpr, region: Region,
          volume: DifferentialForm | None = None, *, profiles=None
          ) -> tuple[DifferentialForm, Classification]:
    """``(1 - f) alpha + f omega`` and its classification on ``region``."""
    alpha._same(omega)
    f = f if isinstance(f, ScalarExpr) else ScalarExpr.const(f)
    pts = region.grid(f.coords_used())
    vals, _ = kernels.eval_grid([f], pts, profiles, dim=region.chart.dim)
    if np.any(vals < -1e-12) or np.any(vals > 1 + 1e-12):
        raise BadBlendRange(f"blend function leaves [0, 1]: range "
                            f"[{vals.min():.6g}, {vals.max():.6g}]")
    mixed = alpha * (ScalarExpr.const(1) - f) + omega * f
    return mixed, classify(mixed, region, volume, profiles=profiles)
