"""Named constructions: standard and Lutz tubes, bLob checks, doubles, Euler
sections, Giroux domains and the pre-Lagrangian blow-up chart.

Every builder returns a :class:`NamedConstruction` whose ``checks`` hold the
verdicts for its expected-identity table and whose ``observations`` hold
quantities that are reported without being asserted.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .chart import ANGLE, LINEAR, RADIAL, Chart, bounded
from .contact import (ContactClass, Region, classify, conductivity_check, contact_coefficient,
                      default_volume, non_contact_locus, scan, tau)
from .errors import BadAssignment
from .forms import (DiagonalMetric, DifferentialForm, VectorField, ext_d, interior,
                    perm_sign, pullback, restrict, top_ratio, wedge, wedge_power)
from .profiles import smoothstep_profile
from .report import Check, Observation, ReportDocument, Status, symbolic_check, truth_check
from .scalar import (COS, DEFAULT_SEED, FN, SIN, Exact, ScalarExpr, coord, cos, evaluate, fn,
                     is_zero, norm, sin)

__all__ = [
    "NamedConstruction", "tube_chart", "omega_tw", "twist_bracket", "reference_tau",
    "make_standard_tube", "make_lutz_confoliation", "verify_blob", "build_double_and_tube",
    "euler_sections", "giroux_domain", "prelag_blowup_check", "rename_pullback",
    "RegionRecord",
]

ONE = ScalarExpr.const(1)
SQRT_PI = math.sqrt(math.pi)


def _x(i: int, e: int = 1) -> ScalarExpr:
    return ScalarExpr.atom(coord(i, e))


def _prod(factors) -> ScalarExpr:
    out = ONE
    for f in factors:
        out = out * f
    return out


def _a(atom) -> ScalarExpr:
    return ScalarExpr.atom(atom)


@dataclass
class NamedConstruction:
    name: str
    chart: Chart
    forms: dict = field(default_factory=dict)
    regions: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    observations: list[Observation] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    @property
    def expected(self) -> list[tuple[str, str]]:
        return [(c.name, c.payload.get("expected", "")) for c in self.checks]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def report(self, seed: int = DEFAULT_SEED) -> ReportDocument:
        return ReportDocument(self.name, dict(self.parameters), seed, list(self.checks),
                              list(self.observations))


# --------------------------------------------------------------------------
# tube charts and the twisted form

def tube_chart(n: int, core: str = "circle") -> Chart:
    """``(phi, r_1, theta_1, ..., r_n, theta_n)``, or ``z`` in place of ``phi`` for a line core."""
    if n < 1:
        raise ValueError("n must be at least 1")
    first = ("phi", ANGLE) if core == "circle" else ("z", LINEAR)
    coords = [first]
    for i in range(1, n + 1):
        coords += [(f"r{i}", RADIAL), (f"theta{i}", ANGLE)]
    return Chart.of(coords)


def _r(i: int) -> int:
    return 2 * i - 1


def _th(i: int) -> int:
    return 2 * i


def _cos_r2(i: int, exp: int = 1) -> ScalarExpr:
    return _a(cos(_r(i), True, exp))


def _sin_r2(i: int, exp: int = 1) -> ScalarExpr:
    return _a(sin(_r(i), True, exp))


def omega_tw(chart: Chart) -> DifferentialForm:
    n = (chart.dim - 1) // 2
    out = DifferentialForm.basis(chart, 0) * _prod(_cos_r2(i) for i in range(1, n + 1))
    for i in range(1, n + 1):
        out = out + DifferentialForm.basis(chart, _th(i)) * _sin_r2(i)
    return out


def xi0(chart: Chart) -> DifferentialForm:
    n = (chart.dim - 1) // 2
    out = DifferentialForm.basis(chart, 0)
    for i in range(1, n + 1):
        out = out + DifferentialForm.basis(chart, _th(i)) * _x(_r(i), 2)
    return out


def twist_bracket(n: int) -> ScalarExpr:
    """``prod cos^2 r_i^2 + sum_i sin^2 r_i^2 prod_{j != i} cos^2 r_j^2``."""
    idx = range(1, n + 1)
    out = _prod(_cos_r2(i, 2) for i in idx)
    for i in idx:
        out = out + _sin_r2(i, 2) * _prod(_cos_r2(j, 2) for j in idx if j != i)
    return out


def _lead(n: int) -> int:
    return 2 ** (n - 1) * math.factorial(n - 1)


def reference_tau(chart: Chart) -> DifferentialForm:
    """The grouped tau(omega_tw) expansion, transcribed term by term."""
    n = (chart.dim - 1) // 2
    idx = range(1, n + 1)
    out = DifferentialForm.zero(chart, 2)
    for i, j in itertools.permutations(idx, 2):
        outer = _prod(_cos_r2(k) for k in idx if k not in (i, j))
        inner_prod = _prod(_cos_r2(k) for k in idx if k != i)
        bracket = (DifferentialForm.basis(chart, _th(i)) * (inner_prod * _sin_r2(i) * _sin_r2(j))
                   - DifferentialForm.basis(chart, _th(j)) * inner_prod
                   + DifferentialForm.basis(chart, 0) * (_cos_r2(i) * _sin_r2(j)))
        rdr = DifferentialForm.basis(chart, _r(j)) * _x(_r(j))
        out = out + wedge(bracket * outer, rdr)
    return out * _lead(n)


def reference_tau_expanded(chart: Chart) -> DifferentialForm:
    """The middle (ungrouped) line of the reference tau expansion."""
    n = (chart.dim - 1) // 2
    idx = range(1, n + 1)
    out = DifferentialForm.zero(chart, 2)
    b = lambda k: DifferentialForm.basis(chart, k)  # noqa: E731
    for i, j in itertools.permutations(idx, 2):
        c2 = _prod(_cos_r2(k, 2) for k in idx if k not in (i, j))
        out = out + wedge(b(_r(j)) * (_x(_r(j)) * _cos_r2(j) * c2), b(_th(j)))
        out = out + wedge(b(_th(i)) * (_sin_r2(i) * _sin_r2(j) * _cos_r2(j) * c2),
                          b(_r(j)) * _x(_r(j)))
    for j in idx:
        c1 = _prod(_cos_r2(k) for k in idx if k != j)
        out = out + wedge(b(0) * (_sin_r2(j) * c1), b(_r(j)) * _x(_r(j)))
    return out * _lead(n)


def tau_metric(chart: Chart) -> DiagonalMetric:
    """``dphi^2 + sum(r_i^2 dr_i^2 + dtheta_i^2)``, the metric the reference tau corresponds to."""
    entries = [ONE]
    n = (chart.dim - 1) // 2
    for i in range(1, n + 1):
        entries += [_x(_r(i), 2), ONE]
    return DiagonalMetric(chart, entries)


def tube_region(chart: Chart, radius: float, *, grid: int = 25, seed: int = DEFAULT_SEED,
                name: str = "") -> Region:
    n = (chart.dim - 1) // 2
    bounds = {f"r{i}": (0.0, radius) for i in range(1, n + 1)}
    if chart.names[0] == "z":
        bounds["z"] = (-1.0, 1.0)
    return Region(chart, bounds, resolution=grid, seed=seed, name=name)


def locus_strata(n: int, radius: float) -> list[dict]:
    """Locus strata ``{r_i = sqrt((1/2+l) pi), r_j = sqrt((1/2+m) pi)}`` inside the radius."""
    levels = [math.sqrt((0.5 + l) * math.pi) for l in range(0, 64)
              if math.sqrt((0.5 + l) * math.pi) <= radius + 1e-12]
    out = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for a, b in itertools.product(levels, repeat=2):
            out.append({f"r{i}": a, f"r{j}": b})
    return out


# --------------------------------------------------------------------------
# standard tube

def make_standard_tube(n: int, *, grid: int = 25, seed: int = DEFAULT_SEED) -> NamedConstruction:
    ch = tube_chart(n)
    alpha = xi0(ch)
    nc = NamedConstruction("standard-tube", ch, {"xi0": alpha}, parameters={"n": n, "grid": grid})
    lead = 2 ** n * math.factorial(n)
    coef = contact_coefficient(alpha)
    nc.checks.append(symbolic_check("volume coefficient (cylindrical)", coef,
                                    ScalarExpr.const(lead), seed=seed, names=ch.names))
    coord_coef = top_ratio(wedge(alpha, wedge_power(ext_d(alpha), n)),
                           DifferentialForm.basis(ch, *range(ch.dim)))
    nc.checks.append(symbolic_check("volume coefficient (coordinate)", coord_coef,
                                    ScalarExpr.const(lead) * _prod(_x(_r(i)) for i in range(1, n + 1)),
                                    seed=seed, names=ch.names))
    region = tube_region(ch, SQRT_PI, grid=grid, seed=seed, name="U(sqrt(pi))")
    nc.regions["U"] = region
    cl = classify(alpha, region)
    nc.checks.append(truth_check("classify", cl.kind is ContactClass.CONTACT,
                                 {"class": cl.kind.value, **cl.certificate.payload}))
    # x dy - y dx = r^2 dtheta
    cart = Chart.of([("phi", ANGLE)] + [c for i in range(1, n + 1)
                                        for c in ((f"x{i}", LINEAR), (f"y{i}", LINEAR))])
    lam = DifferentialForm.basis(cart, 0)
    for i in range(1, n + 1):
        xi, yi = 2 * i - 1, 2 * i
        lam = lam + DifferentialForm.basis(cart, yi) * _x(xi) - DifferentialForm.basis(cart, xi) * _x(yi)
    images = [_x(0)]
    for i in range(1, n + 1):
        images += [_x(_r(i)) * _a(cos(_th(i))), _x(_r(i)) * _a(sin(_th(i)))]
    nc.checks.append(symbolic_check("cartesian form pulls back to xi0",
                                    pullback(lam, ch, images), alpha, seed=seed))
    torus = restrict(alpha, {f"r{i}": 1 for i in range(1, n + 1)})
    expected = DifferentialForm.basis(torus.chart, 0)
    for k in range(1, torus.chart.dim):
        expected = expected + DifferentialForm.basis(torus.chart, k)
    nc.checks.append(symbolic_check("restriction to r_i = 1", torus, expected, seed=seed))
    return nc


# --------------------------------------------------------------------------
# Lutz confoliation

def make_lutz_confoliation(n: int, core: str = "circle", *, grid: int = 25,
                           seed: int = DEFAULT_SEED, conductivity: bool = True,
                           use_numba: bool | None = None) -> NamedConstruction:
    if core not in ("circle", "line"):
        raise ValueError(f"unknown core {core!r}")
    ch = tube_chart(n, core)
    w = omega_tw(ch)
    nc = NamedConstruction("lutz-confoliation", ch, {"omega_tw": w},
                           parameters={"n": n, "core": core, "grid": grid})
    lead = 2 ** n * math.factorial(n)
    coef = contact_coefficient(w)
    nc.checks.append(symbolic_check("bracket expansion", coef, twist_bracket(n) * lead,
                                    seed=seed, names=ch.names))
    region = tube_region(ch, SQRT_PI, grid=grid, seed=seed, name="U(sqrt(pi))")
    nc.regions["U"] = region
    cl = classify(w, region)
    want = ContactClass.CONTACT if n == 1 else ContactClass.CONFOLIATION
    nc.checks.append(truth_check("classify", cl.kind is want,
                                 {"class": cl.kind.value, "expected": want.value,
                                  **cl.certificate.payload}))
    # strata values make the bracket vanish exactly
    half = Exact.sqrt_pi(Fraction(1, 2))
    bracket = twist_bracket(n)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        sub = bracket.substitute(_r(i), half).substitute(_r(j), half)
        nc.checks.append(symbolic_check(f"bracket vanishes on stratum r{i}=r{j}=sqrt(pi/2)",
                                        sub, ScalarExpr(), seed=seed, names=ch.names))
    strata = locus_strata(n, SQRT_PI)
    loc = non_contact_locus(w, region, strata)
    payload = loc.certificate.payload
    if n == 1:
        nc.checks.append(truth_check("non-contact locus", not loc.zeros,
                                     {"zeros": len(loc.zeros), "expected": "empty"}))
    else:
        nc.checks.append(truth_check("non-contact locus", loc.matches,
                                     {"zeros": len(loc.zeros), "strata": payload["strata"],
                                      "zeros_matched": loc.zeros_matched,
                                      "strata_covered": loc.strata_covered,
                                      "expected": [{k: round(v, 12) for k, v in s.items()}
                                                   for s in strata]}))
    nc.aux["locus"] = loc
    if n >= 2 and core == "circle":
        _tau_checks(nc, w, loc, seed)
        if conductivity:
            flow = {f"r{i}": (0.0, 2 * SQRT_PI) for i in range(1, n + 1)}
            rep = conductivity_check(w, region, starts=loc.zeros, flow_bounds=flow,
                                     use_numba=use_numba)
            ok = rep.all_arrived and rep.null_violations == 0 and rep.max_steps_used <= 10_000
            pl = dict(rep.certificate.payload)
            paths = pl.pop("paths")
            pl["paths_traced"] = len(paths)
            pl["first_paths"] = paths[:4]
            nc.checks.append(truth_check("conductivity", ok, pl))
    return nc


def _tau_checks(nc: NamedConstruction, w: DifferentialForm, loc, seed: int) -> None:
    ch = w.chart
    n = (ch.dim - 1) // 2
    t = tau(w, tau_metric(ch))
    grouped = reference_tau(ch)
    chk = symbolic_check("tau grouped expansion", t, grouped, seed=seed)
    if n == 2:
        nc.checks.append(chk)
    else:
        nc.observations.append(Observation("tau grouped expansion", {
            "matches": chk.passed, "zero_test": chk.payload["zero_test"]}))
    middle = symbolic_check("tau expanded line", t, reference_tau_expanded(ch), seed=seed)
    nc.observations.append(Observation("tau expanded line", {
        "matches": middle.passed, "zero_test": middle.payload["zero_test"]}))
    cyl = tau(w, DiagonalMetric.cylindrical(ch))
    nc.observations.append(Observation("tau with cylindrical metric", {
        "metric": "dphi^2 + sum(dr_i^2 + r_i^2 dtheta_i^2)",
        "equals_reference": bool(symbolic_check("cyl", cyl, grouped, seed=seed).passed),
        "form": cyl.to_text() if n == 2 else f"{len(cyl.components)} components"}))
    # on the locus tau vanishes, so Null(tau)^perp = {0}
    comps = list(t.components.values())
    worst = 0.0
    for z in loc.zeros:
        for c in comps:
            worst = max(worst, abs(evaluate(c, z)))
    payload = {"max_abs_component": worst, "points": len(loc.zeros), "tolerance": 1e-6}
    if n == 2:
        nc.checks.append(truth_check("tau vanishes on the locus", worst <= 1e-6, payload))
    else:
        nc.observations.append(Observation("tau vanishes on the locus",
                                           {"vanishes": worst <= 1e-6, **payload}))


# --------------------------------------------------------------------------
# bLob

def verify_blob(n: int, *, sabotage: bool = False, seed: int = DEFAULT_SEED,
                grid: int = 25) -> NamedConstruction:
    """Fiber/boundary checks for P = {r_1 <= sqrt(pi), r_2 = ... = r_n = sqrt(pi)}.

    With ``sabotage`` the value r_2 = sqrt(pi/2) is used instead, which puts P on the locus.
    """
    ch = tube_chart(n)
    w = omega_tw(ch)
    nc = NamedConstruction("blob", ch, {"omega_tw": w},
                           parameters={"n": n, "sabotage": sabotage})
    if n == 1:
        nc.observations.append(Observation("dimension three", {
            "case": "overtwisted disk case",
            "detail": "P is the disc {r1 <= sqrt(pi)}; its boundary is Legendrian"}))
    pvals = {i: Exact.sqrt_pi(1) for i in range(2, n + 1)}
    if sabotage and n >= 2:
        pvals[2] = Exact.sqrt_pi(Fraction(1, 2))
    # (i) P avoids the locus: the bracket restricted to P is a positive constant
    sub = twist_bracket(n)
    for i, v in pvals.items():
        sub = sub.substitute(_r(i), v)
    const = sub.constant_value()
    if const is not None and const > 0:
        nc.checks.append(Check("P avoids the locus", Status.SYMBOLIC_PASS,
                               {"bracket_on_P": str(const), "expected": "positive constant"}))
    else:
        sub_chart = Chart.of([("r1", RADIAL)])
        reduced = sub.reindex({_r(1): 0})
        rg = Region(sub_chart, {"r1": (0.0, SQRT_PI)}, resolution=grid, seed=seed)
        sc = scan(reduced, rg)
        nc.checks.append(Check("P avoids the locus", Status.FAIL, {
            "bracket_on_P": str(sub), "expected": "positive constant",
            "min": sc.min_value, "zeros": [list(z) for z in sc.zeros]}))
    # (ii) fibers {phi = phi0, theta_1 = theta_bar} of P are Legendrian
    for theta_bar in (0, Fraction(1, 2), 3):
        assignment = {"phi": 0, "theta1": theta_bar}
        assignment.update({f"r{i}": v for i, v in pvals.items()})
        fib = restrict(w, assignment)
        nc.checks.append(symbolic_check(f"fiber theta1={theta_bar} pullback", fib,
                                        DifferentialForm.zero(fib.chart, 1), seed=seed))
    # (iii) boundary of N
    torus = restrict(w, {f"r{i}": Exact.sqrt_pi(1) for i in range(1, n + 1)})
    nc.checks.append(symbolic_check("restriction to all r_i = sqrt(pi)", torus,
                                    DifferentialForm.basis(torus.chart, 0) * (-1) ** n, seed=seed))
    dn = restrict(torus, {"phi": 0})
    nc.checks.append(symbolic_check("boundary pullback", dn, DifferentialForm.zero(dn.chart, 1),
                                    seed=seed))
    # (iv) binding at r_1 = 0 and transversality of fibers to the boundary
    binding = restrict(w, {"r1": 0, **{f"r{i}": v for i, v in pvals.items()}})
    nc.observations.append(Observation("binding restriction", {"form": binding.to_text()}))
    names = ch.names
    tn = ["r1"] + [f"theta{i}" for i in range(1, n + 1)]
    tf = ["r1"] + [f"theta{i}" for i in range(2, n + 1)]
    tdn = [f"theta{i}" for i in range(1, n + 1)]
    basis = {c: np.eye(len(tn))[tn.index(c)] for c in tn}
    rank = np.linalg.matrix_rank(np.array([basis[c] for c in tf + tdn]))
    nc.checks.append(truth_check("fibers transverse to the boundary", rank == len(tn), {
        "TF": tf, "TdN": tdn, "TN": tn, "rank": int(rank)}, grid=False))
    del names
    return nc


# --------------------------------------------------------------------------
# double, model tube, wide domain

@dataclass
class RegionRecord:
    """A set of labelled samples described by inclusions and removed core tubes."""
    name: str
    pieces: tuple[str, ...]
    removed: tuple[str, ...] = ()
    boundary: tuple[str, ...] = ()

    def mask(self, labels: np.ndarray, core: dict[str, np.ndarray]) -> np.ndarray:
        m = np.isin(labels, self.pieces)
        for c in self.removed:
            m &= ~core[c]
        return m


def _swap_trig_arg(e: ScalarExpr, t_index: int, r_index: int) -> ScalarExpr:
    """Replace sin(t), cos(t) by sin(r^2), cos(r^2)."""
    def sub(b, ex):
        if b.index == t_index and b.tag in (SIN, COS) and not b.squared:
            return [(1, [(sin if b.tag == SIN else cos)(r_index, True, ex)])]
        return None
    return e.map_bases(sub)


def collar_form(n: int, i: int) -> DifferentialForm:
    """cos t (prod_{j != i} cos r_j^2) dphi + sin t dtheta_i + sum_{j != i} sin r_j^2 dtheta_j."""
    coords = [("phi", ANGLE), ("t", LINEAR), (f"theta{i}", ANGLE)]
    others = [j for j in range(1, n + 1) if j != i]
    for j in others:
        coords += [(f"r{j}", RADIAL), (f"theta{j}", ANGLE)]
    ch = Chart.of(coords)
    cj = lambda j: _a(cos(ch.index(f"r{j}"), True))  # noqa: E731
    sj = lambda j: _a(sin(ch.index(f"r{j}"), True))  # noqa: E731
    out = DifferentialForm.basis(ch, 0) * (_a(cos(1)) * _prod(cj(j) for j in others))
    out = out + DifferentialForm.basis(ch, 2) * _a(sin(1))
    for j in others:
        out = out + DifferentialForm.basis(ch, f"theta{j}") * sj(j)
    return out


def build_double_and_tube(n: int, k: int = 1, *, grid: int = 25, seed: int = DEFAULT_SEED,
                          core_radius: float | None = None) -> NamedConstruction:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    ch = tube_chart(n)
    w = omega_tw(ch)
    q = Fraction(k + 1, 2)
    face_val = Exact.sqrt_pi(q)
    R = float(face_val)
    nc = NamedConstruction("double", ch, {"omega_tw": w},
                           parameters={"n": n, "fold": k, "grid": grid})
    nc.regions["U"] = tube_region(ch, R, grid=grid, seed=seed, name=f"U(sqrt({q}*pi))")
    cq = (1, 0, -1, 0)[int(2 * q) % 4]
    sq = (0, 1, 0, -1)[int(2 * q) % 4]
    for i in range(1, n + 1):
        no_dr = all(_r(i) not in key for key in w.components)
        nc.checks.append(truth_check(f"face {i}: no dr{i} component", no_dr,
                                     {"components": [list(kk) for kk in w.components]}, grid=False))
        face = restrict(w, {f"r{i}": face_val})
        fc = face.chart
        others = [j for j in range(1, n + 1) if j != i]
        exp = DifferentialForm.basis(fc, 0) * (cq * _prod(_a(cos(fc.index(f"r{j}"), True))
                                                            for j in others))
        if sq:
            exp = exp + DifferentialForm.basis(fc, f"theta{i}") * sq
        for j in others:
            exp = exp + DifferentialForm.basis(fc, f"theta{j}") * _a(sin(fc.index(f"r{j}"), True))
        nc.checks.append(symbolic_check(f"face {i} restriction", face, exp, seed=seed))
        if i == 1:
            _collar_checks(nc, n, i, face, q, seed)
    _bookkeeping(nc, n, R, grid, core_radius)
    return nc


def _collar_checks(nc: NamedConstruction, n: int, i: int, face: DifferentialForm,
                   q: Fraction, seed: int) -> None:
    col = collar_form(n, i)
    cc = col.chart
    nc.forms["collar"] = col
    # t = r_i^2 turns the collar form into omega_tw (the collar form has no dt term)
    w = omega_tw(tube_chart(n))
    ren = {0: 0, 1: _r(i), 2: _th(i)}
    for j in range(1, n + 1):
        if j != i:
            ren[cc.index(f"r{j}")] = _r(j)
            ren[cc.index(f"theta{j}")] = _th(j)
    no_dt = all(1 not in key for key in col.components)
    moved = DifferentialForm(w.chart, 1, {
        tuple(sorted(ren[a] for a in key)): _swap_trig_arg(c.reindex({**ren, 1: 1}), 1, _r(i))
        for key, c in col.components.items()}) if no_dt else None
    nc.checks.append(truth_check("collar form has no dt term", no_dt, {}, grid=False))
    if moved is not None:
        nc.checks.append(symbolic_check("collar form at t = r_i^2 equals omega_tw", moved, w,
                                        seed=seed))
    at_face = restrict(col, {"t": Exact.pi(q)})
    face_re = _align(face, at_face.chart)
    nc.checks.append(symbolic_check(f"collar at t = {q}*pi equals the face form", at_face,
                                    face_re, seed=seed))
    at0 = restrict(col, {"t": 0})
    flipped = _flip_phi(face_re)
    nc.observations.append(Observation("collar sign at t = 0", {
        "collar_at_0": at0.to_text(), "face": face_re.to_text(),
        "equal_as_given": at0 == face_re,
        "equal_after_phi_to_minus_phi": at0 == flipped,
        "equal_after_t_to_t_plus_pi": at_face == face_re,
        "reconciliation": "shift t -> t + pi (or reverse phi) on the collar"}))


def _align(form: DifferentialForm, chart: Chart) -> DifferentialForm:
    """Re-express a form on a chart with the same coordinate names in another order."""
    perm = {form.chart.index(nm): chart.index(nm) for nm in form.chart.names}
    comps = {}
    for key, c in form.components.items():
        new = [perm[a] for a in key]
        s = perm_sign(new)
        comps[tuple(sorted(new))] = c.reindex(perm) * s
    return DifferentialForm(chart, form.degree, comps)


def _flip_phi(form: DifferentialForm) -> DifferentialForm:
    i = form.chart.index("phi")
    return DifferentialForm(form.chart, form.degree,
                            {k: (-c if i in k else c) for k, c in form.components.items()})


def _bookkeeping(nc: NamedConstruction, n: int, R: float, grid: int,
                 core_radius: float | None) -> None:
    rc = core_radius if core_radius is not None else 0.25 * SQRT_PI
    axis = np.linspace(0.0, R, max(grid // 2, 5))
    mesh = np.array(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1).T
    t_axis = np.linspace(0.0, math.pi, 7)
    labels = np.array(["A"] * len(mesh) + ["B"] * len(mesh) + ["collar"] * (len(t_axis) * len(mesh)))
    radii = np.concatenate([mesh, mesh, np.repeat(mesh, len(t_axis), axis=0)])
    inside = np.sqrt(np.sum(radii ** 2, axis=1)) <= rc
    core = {"coreA": (labels == "A") & inside, "coreB": (labels == "B") & inside}
    double = RegionRecord("double", ("A", "B", "collar"))
    model = RegionRecord("model tube", ("A", "B", "collar"), ("coreA",), ("boundary of coreA",))
    wide = RegionRecord("wide Giroux domain", ("A", "B", "collar"), ("coreA", "coreB"),
                        ("boundary of coreA", "boundary of coreB"))
    D, M, W = (r.mask(labels, core) for r in (double, model, wide))
    ok = {
        "double = A + B + collar": bool(np.all(D)),
        "model tube + core A = double": bool(np.array_equal(M | core["coreA"], D)),
        "model tube and core A disjoint": not np.any(M & core["coreA"]),
        "wide + core A + core B = double": bool(np.array_equal(W | core["coreA"] | core["coreB"], D)),
        "wide inside model tube": bool(np.all(M[W])),
        "cores disjoint": not np.any(core["coreA"] & core["coreB"]),
        "wide domain has two boundary faces": len(wide.boundary) == 2,
    }
    nc.aux["records"] = {r.name: r for r in (double, model, wide)}
    nc.checks.append(truth_check("region bookkeeping", all(ok.values()), {
        "identities": ok, "samples": int(len(labels)), "core_radius": rc,
        "counts": {"double": int(D.sum()), "model tube": int(M.sum()), "wide": int(W.sum())}}))


# --------------------------------------------------------------------------
# Euler sections

def _profile_const(e: ScalarExpr, name: str, value: int) -> ScalarExpr:
    def sub(b, ex):
        if b.tag == FN and b.name == name:
            if b.order > 0:
                return [(0, [])]
            return [(Fraction(value) ** ex, [])]
        return None
    return e.map_bases(sub)


def euler_sections(n: int, *, grid: int = 25, seed: int = DEFAULT_SEED,
                   eps: float = 0.2) -> NamedConstruction:
    ch = tube_chart(n)
    w = omega_tw(ch)
    rs = [_r(i) for i in range(1, n + 1)]
    g = _a(fn("g", rs))
    rr = _a(norm(rs))
    ssum = sum((_sin_r2(i) for i in range(1, n + 1)), ScalarExpr())
    cprod = _prod(_cos_r2(i) for i in range(1, n + 1))
    comps = {ri: g * _x(ri) for ri in rs}
    comps[0] = (ONE - g) * rr * ssum
    for i in range(1, n + 1):
        comps[_th(i)] = -((ONE - g) * rr * cprod)
    s1 = VectorField(ch, comps)
    s2 = VectorField(ch, {ri: -_x(ri) for ri in rs})
    nc = NamedConstruction("euler-sections", ch, {"omega_tw": w}, aux={"sigma1": s1, "sigma2": s2},
                           parameters={"n": n, "grid": grid, "plateau": eps})
    pair = lambda X: interior(X, w).components.get((), ScalarExpr())  # noqa: E731
    nc.checks.append(symbolic_check("omega_tw(sigma1) with opaque g", pair(s1), ScalarExpr(),
                                    seed=seed))
    for val in (0, 1):
        sv = VectorField(ch, {i: _profile_const(c, "g", val) for i, c in s1.components.items()})
        nc.checks.append(symbolic_check(f"omega_tw(sigma1) on the g = {val} plateau", pair(sv),
                                        ScalarExpr(), seed=seed))
    nc.checks.append(symbolic_check("omega_tw(sigma2)", pair(s2), ScalarExpr(), seed=seed))
    prof = smoothstep_profile("g", eps, SQRT_PI - eps, left=-1.0, right=10.0)
    profiles = {"g": prof}
    region = tube_region(ch, SQRT_PI, grid=grid, seed=seed)
    pts = region.grid(rs)
    cells = [region.cell(ri) for ri in rs]
    for label, X in (("sigma1", s1), ("sigma2", s2)):
        vals, _ = kernels.eval_grid(list(X.components.values()), pts, profiles, dim=ch.dim)
        mag = np.max(np.abs(vals), axis=1)
        zero = mag <= 1e-9
        zpts = pts[zero]
        near_core = bool(np.all(np.all(zpts[:, rs] <= np.array(cells) + 1e-12, axis=1)))
        has_core = bool(np.any(np.all(zpts[:, rs] == 0.0, axis=1))) if len(zpts) else False
        nc.checks.append(truth_check(f"{label} zero locus is the core circle",
                                     near_core and has_core,
                                     {"zero_samples": int(zero.sum()), "samples": int(len(pts)),
                                      "min_off_core": float(np.min(mag[~zero])) if np.any(~zero) else None}))
    return nc


# --------------------------------------------------------------------------
# Giroux domain

def giroux_chart(n: int, contactization: bool = False) -> Chart:
    coords = [("phi", ANGLE)] if contactization else []
    half = bounded(-math.pi / 2, math.pi / 2)
    for i in range(1, n + 1):
        coords += [(f"s{i}", half), (f"theta{i}", ANGLE)]
    return Chart.of(coords)


def _det(m: list[list[ScalarExpr]]) -> ScalarExpr:
    size = len(m)
    out = ScalarExpr()
    for p in itertools.permutations(range(size)):
        term = ScalarExpr.const(perm_sign(list(p)))
        for r, c in enumerate(p):
            term = term * m[r][c]
        out = out + term
    return out


def giroux_domain(n: int, *, margin: float = 1e-3, grid: int = 25,
                  seed: int = DEFAULT_SEED) -> NamedConstruction:
    ch = giroux_chart(n)
    s = lambda i: ch.index(f"s{i}")  # noqa: E731
    th = lambda i: ch.index(f"theta{i}")  # noqa: E731
    idx = range(1, n + 1)
    pinv = _prod(_a(cos(s(i), exp=-1)) for i in idx)
    beta = DifferentialForm.zero(ch, 1)
    for j in idx:
        beta = beta + DifferentialForm.basis(ch, th(j)) * (_a(sin(s(j))) * pinv)
    omega = ext_d(beta)
    nc = NamedConstruction("giroux-domain", ch, {"beta": beta, "omega": omega},
                           parameters={"n": n, "margin": margin, "grid": grid})
    reference = DifferentialForm.zero(ch, 2)
    for j in idx:
        reference = reference + DifferentialForm.basis(ch, s(j), th(j)) * _a(cos(s(j), exp=-1))
    for k, l in itertools.permutations(idx, 2):
        reference = reference + DifferentialForm.basis(ch, s(l), th(k)) * (
            _a(sin(s(k))) * _a(sin(s(l))) * _a(cos(s(l), exp=-1)))
    reference = reference * pinv
    nc.checks.append(symbolic_check("omega = d beta (reference expansion)", omega, reference, seed=seed))
    mat = [[ONE if a == b else _a(sin(s(a))) * _a(sin(s(b))) for b in idx] for a in idx]
    det = _det(mat)
    nc.aux["determinant"] = det
    vol = DifferentialForm.basis(ch, *range(ch.dim))
    ratio = top_ratio(wedge_power(omega, n), vol)
    expected = det * pinv ** (n + 1) * math.factorial(n)
    nc.checks.append(symbolic_check("omega^n (reference determinant)", ratio, expected, seed=seed))
    if n == 2:
        closed = ONE - _a(sin(s(1), exp=2)) * _a(sin(s(2), exp=2))
        chk = symbolic_check("n=2 determinant expansion", det, closed, seed=seed)
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(64):
            a, b = rng.uniform(-1.5, 1.5, 2)
            pt = [0.0] * ch.dim
            pt[s(1)], pt[s(2)] = a, b
            m = np.array([[1.0, math.sin(a) * math.sin(b)], [math.sin(a) * math.sin(b), 1.0]])
            worst = max(worst, abs(evaluate(det, pt) - np.linalg.det(m)))
        chk.payload["numeric_max_error"] = worst
        if worst > 1e-12:
            chk.status = Status.FAIL
        nc.checks.append(chk)
    lo, hi = -math.pi / 2 + margin, math.pi / 2 - margin
    region = Region(ch, {f"s{i}": (lo, hi) for i in idx}, resolution=grid, seed=seed,
                    name="int Sigma")
    nc.regions["interior"] = region
    # divided by prod cos^2 s_i > 0 so corner values stay well-scaled
    sc = scan(det * _prod(_a(cos(s(i), exp=-2)) for i in idx), region)
    nc.checks.append(truth_check("determinant positive on the interior", sc.min_value > 1e-9,
                                 {"normalised_by": "prod cos^2 s_i", **sc.summary()}))
    P = _prod(_a(cos(s(i))) for i in idx)
    fbeta = beta * P
    target = DifferentialForm.zero(ch, 1)
    for j in idx:
        target = target + DifferentialForm.basis(ch, th(j)) * _a(sin(s(j)))
    nc.checks.append(symbolic_check("f beta = sum sin s_i dtheta_i", fbeta, target, seed=seed))
    poles = any(c.has_poles() for c in fbeta.components.values())
    nc.checks.append(truth_check("f beta extends without poles", not poles, {}, grid=False))
    for i in idx:
        for sign in (1, -1):
            face = restrict(fbeta, {f"s{i}": Exact.pi(Fraction(sign, 2))})
            fc = face.chart
            exp = DifferentialForm.basis(fc, f"theta{i}") * sign
            for j in idx:
                if j != i:
                    exp = exp + DifferentialForm.basis(fc, f"theta{j}") * _a(sin(fc.index(f"s{j}")))
            nc.checks.append(symbolic_check(f"face s{i} = {'+' if sign > 0 else '-'}pi/2", face,
                                            exp, seed=seed))
    _contactization(nc, n, margin, grid, seed)
    if n == 1:
        _annulus_example(nc, seed)
    return nc


def _contactization(nc: NamedConstruction, n: int, margin: float, grid: int, seed: int) -> None:
    ch = giroux_chart(n, contactization=True)
    idx = range(1, n + 1)
    s = lambda i: ch.index(f"s{i}")  # noqa: E731
    pinv = _prod(_a(cos(s(i), exp=-1)) for i in idx)
    P = _prod(_a(cos(s(i))) for i in idx)
    beta = DifferentialForm.zero(ch, 1)
    for j in idx:
        beta = beta + DifferentialForm.basis(ch, f"theta{j}") * (_a(sin(s(j))) * pinv)
    alpha = DifferentialForm.basis(ch, 0) * P + beta * P
    target = DifferentialForm.basis(ch, 0) * P
    for j in idx:
        target = target + DifferentialForm.basis(ch, f"theta{j}") * _a(sin(s(j)))
    nc.forms["contactization"] = alpha
    nc.checks.append(symbolic_check("contactization f dphi + f beta", alpha, target, seed=seed))
    if n == 1:
        expected = (DifferentialForm.basis(ch, 0) * _a(cos(1))
                  + DifferentialForm.basis(ch, 2) * _a(sin(1)))
        nc.checks.append(symbolic_check("n=1 Giroux pi-torsion form", alpha, expected, seed=seed))
    lo, hi = -math.pi / 2 + margin, math.pi / 2 - margin
    region = Region(ch, {f"s{i}": (lo, hi) for i in idx}, resolution=grid, seed=seed)
    scaled = DifferentialForm.basis(ch, *range(ch.dim)) * _prod(_a(cos(s(i), exp=2)) for i in idx)
    cl = classify(alpha, region, scaled)
    nc.checks.append(truth_check("contactization is contact", cl.kind is ContactClass.CONTACT,
                                 {"class": cl.kind.value, **cl.certificate.payload}))


def _annulus_example(nc: NamedConstruction, seed: int) -> None:
    ch = Chart.of([("theta", ANGLE), ("s", bounded(0.0, math.pi))])
    beta = DifferentialForm.basis(ch, 0) * (_a(cos(1)) * _a(sin(1, exp=-1)))
    omega = DifferentialForm.basis(ch, 0, 1) * _a(sin(1, exp=-2))
    nc.checks.append(symbolic_check("annulus: d(cot s dtheta)", ext_d(beta), omega, seed=seed))
    fbeta = beta * _a(sin(1))
    nc.checks.append(symbolic_check("annulus: f beta = cos s dtheta", fbeta,
                                    DifferentialForm.basis(ch, 0) * _a(cos(1)), seed=seed))
    for val, sign in ((0, 1), (Exact.pi(1), -1)):
        face = restrict(fbeta, {"s": val})
        nc.checks.append(symbolic_check(f"annulus: boundary s = {val}", face,
                                        DifferentialForm.basis(face.chart, 0) * sign, seed=seed))
    # (sin s') dt + (cos s') dtheta' versus cos s dphi + sin s dtheta under
    # s = s' - pi/2, theta = -theta', phi = t
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(64):
        sp = rng.uniform(0.0, math.pi)
        s_ = sp - math.pi / 2
        ours = np.array([math.cos(s_), 0.0, -math.sin(s_)])  # (dt, ds', dtheta') after pullback
        example = np.array([math.sin(sp), 0.0, math.cos(sp)])
        worst = max(worst, float(np.max(np.abs(ours - example))))
    nc.checks.append(truth_check("annulus example under s = s' - pi/2, theta -> -theta",
                                 worst <= 1e-12, {"max_error": worst, "samples": 64,
                                                  "tolerance": 1e-12}))


# --------------------------------------------------------------------------
# pre-Lagrangian blow-up

def rename_pullback(a: DifferentialForm, source: Chart, index_map: dict[int, int]) -> DifferentialForm:
    """Pull back along a coordinate renaming ``y_t = x_{index_map[t]}``."""
    comps = {}
    for key, c in a.components.items():
        new = [index_map[t] for t in key]
        s = perm_sign(new)
        comps[tuple(sorted(new))] = c.reindex(index_map) * s
    return DifferentialForm(source, a.degree, comps)


def _spherical(n: int, rho: int, psi: Sequence[int]) -> list[ScalarExpr]:
    out = []
    for i in range(n):
        term = _x(rho)
        for k in range(i):
            term = term * _a(sin(psi[k]))
        if i < n - 1:
            term = term * _a(cos(psi[i]))
        out.append(term)
    return out


def prelag_blowup_check(n: int, *, seed: int = DEFAULT_SEED) -> NamedConstruction:
    A = Chart.of([("phi", ANGLE)] + [(f"theta{i}", ANGLE) for i in range(1, n + 1)]
                 + [(f"s{i}", LINEAR) for i in range(1, n + 1)])
    eta = DifferentialForm.basis(A, 0)
    for i in range(1, n + 1):
        eta = eta + DifferentialForm.basis(A, f"theta{i}") * _x(A.index(f"s{i}"))
    B = Chart.of([("phi", ANGLE)] + [(f"theta{i}", ANGLE) for i in range(1, n + 1)]
                 + [("rho", RADIAL)] + [(f"psi{i}", LINEAR) for i in range(1, n)])
    rho = B.index("rho")
    psi = [B.index(f"psi{i}") for i in range(1, n)]
    sph = _spherical(n, rho, psi)
    images = [_x(0)] + [_x(B.index(f"theta{i}")) for i in range(1, n + 1)] + sph
    sub = pullback(eta, B, images)
    nc = NamedConstruction("prelag-blowup", A, {"eta0": eta, "eta0_spherical": sub},
                           parameters={"n": n})
    pattern = DifferentialForm.basis(B, 0)
    for i in range(1, n + 1):
        pattern = pattern + DifferentialForm.basis(B, f"theta{i}") * sph[i - 1]
    nc.checks.append(symbolic_check("spherical substitution", sub, pattern, seed=seed))
    Bp = Chart.of([("phi'", ANGLE)] + [(f"theta{i}'", ANGLE) for i in range(1, n + 1)]
                  + [(f"psi{i}'", LINEAR) for i in range(1, n)] + [("rho'", RADIAL)])
    rho_p = Bp.index("rho'")
    psi_p = [Bp.index(f"psi{i}'") for i in range(1, n)]
    eta_p = DifferentialForm.basis(Bp, 0)
    for i, e in enumerate(_spherical(n, rho_p, psi_p), start=1):
        eta_p = eta_p + DifferentialForm.basis(Bp, f"theta{i}'") * e
    nc.forms["eta0_prime"] = eta_p
    index_map = {Bp.index(nm + "'"): B.index(nm) for nm in B.names}
    pulled = rename_pullback(eta_p, B, index_map)
    nc.checks.append(symbolic_check("renaming pulls eta0' back to eta0", pulled, sub, seed=seed))
    no_drho = all(rho not in key for key in sub.components)
    sl = restrict(sub, {"rho": 1})
    nc.checks.append(truth_check("rho slice has no d rho", no_drho and "rho" not in sl.chart.names,
                                 {"slice": sl.to_text()}, grid=False))
    ssq = sum((e * e for e in sph), ScalarExpr()) - _x(rho, 2)
    nc.checks.append(symbolic_check("sum s_i^2 = rho^2", ssq, ScalarExpr(), seed=seed))
    coef = top_ratio(wedge(eta, wedge_power(ext_d(eta), n)), DifferentialForm.basis(A, *range(A.dim)))
    c = coef.constant_value()
    nc.checks.append(truth_check("eta0 is contact", c is not None and c != 0,
                                 {"coefficient": str(coef)}, grid=False))
    return nc
