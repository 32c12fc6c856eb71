"""Overtwisted-disc model on Delta_cyl x C and the disc D_ot inside the twisted tube.

Chart ``(z, r_1, phi_1, ..., r_{n-1}, phi_{n-1}, r, phi)``;
``alpha_rho = dz + sum r_i^2 dphi_i + rho(r^2) dphi`` where ``rho`` depends on
``(z, r_i)`` through ``K(z, w)``, ``w = sum r_i^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .chart import ANGLE, LINEAR, RADIAL, Chart
from .constructions import NamedConstruction, RegionRecord, _a, _prod, _x, twist_bracket
from .contact import contact_coefficient
from .errors import ProfileViolation
from .forms import DifferentialForm, ext_d
from .profiles import PiecewiseProfile
from .report import Check, Observation, Status, symbolic_check, truth_check
from .scalar import DEFAULT_SEED, FN, Atom, ScalarExpr, coord, fn

__all__ = ["ot_chart", "alpha_rho", "KFunction", "RhoFamily", "boundary_profile",
           "otw_disc_model"]

EPS = 0.1
C_DEFAULT = 2.0
Q = 0.01
TOP_BAND = 0.06
COLLAR = 0.05
BLEND = (0.035, 0.045)
SQRT_PI = math.sqrt(math.pi)


def ot_chart(n: int) -> Chart:
    coords = [("z", LINEAR)]
    for i in range(1, n):
        coords += [(f"r{i}", RADIAL), (f"phi{i}", ANGLE)]
    coords += [("r", RADIAL), ("phi", ANGLE)]
    return Chart.of(coords)


def alpha_rho(chart: Chart, rho: ScalarExpr) -> DifferentialForm:
    n = (chart.dim - 1) // 2
    out = DifferentialForm.basis(chart, 0)
    for i in range(1, n):
        out = out + DifferentialForm.basis(chart, f"phi{i}") * _x(chart.index(f"r{i}"), 2)
    return out + DifferentialForm.basis(chart, "phi") * rho


def k_eps(s: float, eps: float = EPS) -> float:
    return max(0.0, s - (1.0 - eps))


def bump(x: float, eps: float = EPS) -> float:
    x = abs(x)
    if x >= 1.0 - eps:
        return 0.0
    return (1.0 - (x / (1.0 - eps)) ** 2) ** 2


@dataclass
class KFunction:
    """``K(z, w) = k(|z|) + k(w) - lam B(z) B(w)``; negative exactly on the interior of Delta_eps."""
    eps: float = EPS
    lam: float = 1.0

    def __call__(self, z: float, w: float) -> float:
        return (k_eps(abs(z), self.eps) + k_eps(w, self.eps)
                - self.lam * bump(z, self.eps) * bump(w, self.eps))

    def minimum(self) -> float:
        return -self.lam


def _smoothstep(x: float, a: float, b: float) -> float:
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    u = (x - a) / (b - a)
    return u * u * (3.0 - 2.0 * u)


class RhoFamily:
    """C^1 piecewise quadratic ``rho(s)`` for each parameter value.

    Slopes 1 | ramp | mu | ramp | tau | ramp | 1 over
    0, q, 2q, S-T-q, S-T, S-2q, S-q with S = K + C, so rho(s) = s near 0
    and rho(s) = s - C from S - q on.
    """

    def __init__(self, K: KFunction, C: float = C_DEFAULT, q: float = Q, top: float = TOP_BAND,
                 blend: tuple[float, float] = BLEND):
        self.K, self.C, self.q, self.top, self.blend = K, C, q, top, blend
        self._z = 0
        self._r = None
        self._cache: dict = {}

    def bind(self, chart: Chart) -> "RhoFamily":
        self._z = chart.index("z")
        self._r = [chart.index(f"r{i}") for i in range(1, (chart.dim - 1) // 2)]
        return self

    def slopes(self, k: float) -> tuple[float, float]:
        q, T, C = self.q, self.top, self.C
        uniform = (k - 3 * q) / (k + C - 3 * q)
        h = _smoothstep(k, *self.blend)
        tau = h * uniform + (1.0 - h)
        mu = (k - 3 * q - tau * (T - q)) / (k + C - T - 2 * q)
        return mu, tau

    def profile(self, k: float) -> PiecewiseProfile:
        key = round(k, 15)
        prof = self._cache.get(key)
        if prof is not None:
            return prof
        q, T = self.q, self.top
        S = k + self.C
        mu, tau = self.slopes(k)
        xs = [0.0, q, 2 * q, S - T - q, S - T, S - 2 * q, S - q, S - q + 1e3]
        seg_slopes = [(1, 1), (1, mu), (mu, mu), (mu, tau), (tau, tau), (tau, 1), (1, 1)]
        pieces = []
        y = 0.0
        for (a, b), x0, x1 in zip(seg_slopes, xs, xs[1:]):
            h = x1 - x0
            c2 = (b - a) / (2 * h)
            pieces.append([y, a, c2])
            y = y + a * h + c2 * h * h
        prof = PiecewiseProfile("rho", xs, pieces)
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[key] = prof
        return prof

    def k_at(self, point) -> float:
        w = sum(point[i] ** 2 for i in self._r)
        return self.K(point[self._z], w)

    def __call__(self, s: float, order: int = 0, point=None) -> float:
        return self.profile(self.k_at(point))(s, order)


def boundary_profile(eps: float = EPS, g0: float = 0.9) -> PiecewiseProfile:
    """``g(-1) = g0``, Hermite rise to sqrt(pi) on [-1, -1+eps], then constant."""
    rise = PiecewiseProfile.hermite("g", [-1.0, -1.0 + eps], [g0, SQRT_PI], [0.0, 0.0]).pieces[0]
    return PiecewiseProfile("g", [-1.0, -1.0 + eps, 1.0 - eps], [rise, [SQRT_PI]], "increasing")


def _fn_sub(e: ScalarExpr, name: str, values: dict[int, ScalarExpr]) -> ScalarExpr:
    def sub(b, ex):
        if b.tag == FN and b.name == name:
            v = values[b.order] ** ex
            return [(c, [Atom(bb, ee) for bb, ee in k]) for k, c in v.terms]
        return None
    return e.map_bases(sub)


def otw_disc_model(n: int, *, eps: float = EPS, C: float = C_DEFAULT, grid: int = 25,
                   seed: int = DEFAULT_SEED, g: PiecewiseProfile | None = None) -> NamedConstruction:
    if n < 1:
        raise ValueError("n must be at least 1")
    ch = ot_chart(n)
    r = ch.index("r")
    K = KFunction(eps)
    if not C > -K.minimum():
        raise ProfileViolation(f"C = {C} must exceed -min K = {-K.minimum()}")
    rho_sym = _a(fn("rho", r, squared=True))
    alpha = alpha_rho(ch, rho_sym)
    nc = NamedConstruction("otw-disc", ch, {"alpha_rho": alpha}, parameters={
        "n": n, "eps": eps, "C": C, "q": Q, "top_band": TOP_BAND, "collar": COLLAR,
        "lambda": K.lam, "grid": grid})
    lead = math.factorial(n) * 2 ** n
    # parameter dependence of rho does not enter the coefficient
    generic = rho_sym + _a(fn("kz", 0)) * _a(fn("sigma", r, squared=True))
    if n >= 2:
        generic = generic + _a(fn("kr", ch.index("r1"), squared=True))
    coef = contact_coefficient(alpha_rho(ch, generic))
    expected = (_a(fn("rho", r, squared=True, order=1))
                + _a(fn("kz", 0)) * _a(fn("sigma", r, squared=True, order=1))) * lead
    nc.checks.append(symbolic_check("contact coefficient n! 2^n rho'(r^2)", coef, expected, seed=seed))
    standard = alpha_rho(ch, _x(r, 2))
    plateau = DifferentialForm(ch, 1, {k: _fn_sub(c, "rho", {0: _x(r, 2), 1: ScalarExpr.const(1)})
                                       for k, c in alpha.components.items()})
    nc.checks.append(symbolic_check("rho(s) = s gives the standard form", plateau, standard, seed=seed))
    cf = Fraction(C).limit_denominator(10 ** 6)
    shifted = DifferentialForm(ch, 1, {k: _fn_sub(c, "rho", {0: _x(r, 2) - cf, 1: ScalarExpr.const(1)})
                                       for k, c in alpha.components.items()})
    nc.checks.append(symbolic_check("rho(s) = s - C leaves d alpha unchanged", ext_d(shifted),
                                    ext_d(standard), seed=seed))
    rho = RhoFamily(K, C).bind(ch)
    _profile_conditions(nc, rho, n, grid)
    _collar_certificate(nc, ch, rho, coef_expr=contact_coefficient(alpha), grid=grid)
    g = g if g is not None else boundary_profile(eps)
    _disc_pieces(nc, n, g, eps, grid)
    return nc


def _param_samples(n: int, grid: int) -> list[tuple[float, float]]:
    zs = np.linspace(-1.0, 1.0, grid)
    ws = np.linspace(0.0, 1.0, grid) if n >= 2 else np.array([0.0])
    return [(float(z), float(w)) for z in zs for w in ws]


def _profile_conditions(nc: NamedConstruction, rho: RhoFamily, n: int, grid: int) -> None:
    worst = {"plateau": 0.0, "shift": 0.0, "c1": 0.0}
    for z, w in _param_samples(n, grid):
        k = rho.K(z, w)
        p = rho.profile(k)
        for s in np.linspace(0.0, rho.q, 5):
            worst["plateau"] = max(worst["plateau"], abs(p(s) - s))
        S = k + rho.C
        for s in np.linspace(S - rho.q, S + 1.0, 7):
            worst["shift"] = max(worst["shift"], abs(p(s) - (s - rho.C)))
        worst["c1"] = max(worst["c1"], max(p.continuity_defects(1)))
    ok = all(v <= 1e-9 for v in worst.values())
    payload = {"max_defects": worst, "tolerance": 1e-9,
               "conditions": ["rho(s) = s on [0, q]", "rho(s) = s - C for s >= K + C - q",
                              "C^1 at breakpoints"]}
    if not ok:
        payload["error"] = "ProfileViolation"
    nc.checks.append(truth_check("rho family conditions", ok, payload))


def _collar_certificate(nc: NamedConstruction, ch: Chart, rho: RhoFamily, coef_expr: ScalarExpr,
                        grid: int) -> None:
    n = (ch.dim - 1) // 2
    r = ch.index("r")
    profiles = {"rho": rho}
    lead = math.factorial(n) * 2 ** n
    rhop = _a(fn("rho", r, squared=True, order=1)) * lead

    def points(zw, s_of):
        rows = []
        for z, w in zw:
            for s in s_of(z, w):
                pt = np.zeros(ch.dim)
                pt[0] = z
                if n >= 2:
                    pt[ch.index("r1")] = math.sqrt(w)
                pt[r] = math.sqrt(max(s, 0.0))
                rows.append(pt)
        return np.array(rows)

    params = _param_samples(n, grid)
    top = points(params, lambda z, w: np.linspace(rho.K(z, w) + rho.C - COLLAR,
                                                  rho.K(z, w) + rho.C, 11))
    side_params = [(z, w) for z, w in params if abs(z) >= 1 - COLLAR or (n >= 2 and w >= 1 - COLLAR)]
    side = points(side_params, lambda z, w: np.linspace(0.0, rho.K(z, w) + rho.C, 41))
    results = {}
    for label, pts in (("top collar", top), ("side collar", side)):
        vals, _ = kernels.eval_grid([rhop], pts, profiles, dim=ch.dim)
        i = int(np.argmin(vals[:, 0]))
        results[label] = {"samples": int(len(pts)), "min_coefficient_over_density": float(vals[i, 0]),
                          "argmin": [float(x) for x in pts[i]]}
    ok = all(v["min_coefficient_over_density"] > 1e-9 for v in results.values())
    nc.checks.append(truth_check("contact near the boundary", ok, {
        **results, "collar_width": COLLAR, "tolerance": 1e-9,
        "coefficient": "n! 2^n rho'(r^2) against the cylindrical volume"}))
    # interior slopes, reported only: the structure is almost contact there
    mins = [min(rho.slopes(rho.K(z, w))) for z, w in params]
    nc.observations.append(Observation("interior slope range", {
        "min_slope": float(min(mins)), "note": "negative slopes allowed away from the boundary"}))
    del coef_expr


def _disc_pieces(nc: NamedConstruction, n: int, g: PiecewiseProfile, eps: float, grid: int) -> None:
    g0 = g(-1.0)
    ends = {"g(-1+eps)": g(-1.0 + eps), "g(1-eps)": g(1.0 - eps), "g(-1)": g0}
    ok_ends = (abs(ends["g(-1+eps)"] - SQRT_PI) <= 1e-12 and abs(ends["g(1-eps)"] - SQRT_PI) <= 1e-12
               and g0 < math.sqrt(math.pi / 2))
    nc.checks.append(truth_check("boundary profile endpoints", ok_ends,
                                 {**ends, "sqrt(pi/2)": math.sqrt(math.pi / 2)}))
    pieces = (
        RegionRecord("graph piece", ("z in [-1, 1-eps]", "r = g(z)", "sum r_i^2 <= g(-1)^2")),
        RegionRecord("side piece", ("z in [-1, 1-eps]", "r <= g(z)", "sum r_i^2 = g(-1)^2")),
        RegionRecord("bottom piece", ("z = -1", "r <= g(-1)", "sum r_i^2 <= g(-1)^2")),
    )
    nc.aux["disc_pieces"] = pieces
    if n == 1:
        nc.observations.append(Observation("disc pieces", {
            "case": "dimension three: the locus is empty, every piece is in the contact part"}))
        return
    # a stratum needs two radii >= sqrt(pi/2); on every piece r_1..r_{n-1} stay <= g(-1)
    stratum_radius = math.sqrt(math.pi / 2)
    structural = g0 < stratum_radius
    bracket = twist_bracket(n)
    zs = np.linspace(-1.0, 1.0 - eps, grid)
    rng = np.random.default_rng(0)
    report = {}
    all_pos = True
    for rec in pieces:
        pts = []
        for z in zs:
            gz = g(float(z))
            dirs = rng.normal(size=(8, n - 1))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            for d in dirs:
                for frac in np.linspace(0.0, 1.0, 5):
                    if rec.name == "graph piece":
                        radii, rr = d * g0 * frac, gz
                    elif rec.name == "side piece":
                        radii, rr = d * g0, gz * frac
                    else:
                        if z != zs[0]:
                            continue
                        radii, rr = d * g0 * frac, g0 * frac
                    pt = np.zeros(2 * n + 1)
                    for i in range(n - 1):
                        pt[2 * i + 1] = abs(radii[i])
                    pt[2 * n - 1] = rr
                    pts.append(pt)
        vals, _ = kernels.eval_grid([bracket], np.array(pts), dim=2 * n + 1)
        m = float(vals[:, 0].min())
        all_pos &= m > 1e-9
        report[rec.name] = {"samples": len(pts), "min_bracket": m}
    nc.checks.append(truth_check("disc pieces avoid the non-contact locus", structural and all_pos, {
        "g(-1)": g0, "stratum_radius": stratum_radius, "pieces": report,
        "chart": "line version (z, r_1, theta_1, ..., r_n, theta_n), r = r_n"}))
