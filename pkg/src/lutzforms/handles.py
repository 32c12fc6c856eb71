"""Symplectic round handle of index k in half-dimension m.

Chart ``(p_1..p_m, q_1..q_m, z, phi)`` with ``omega_0 = sum dp_i ^ dq_i + dz ^ dphi``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .chart import ANGLE, LINEAR, Chart
from .constructions import NamedConstruction, _x
from .contact import ContactClass, Region, char_foliation, classify, dividing_set
from .errors import BadIndex, NotTransverse
from .forms import (DifferentialForm, VectorField, ext_d, interior, lie_derivative, restrict,
                    wedge, wedge_power)
from .report import Check, Observation, Status, symbolic_check, truth_check
from .scalar import DEFAULT_SEED, Exact, ScalarExpr

__all__ = ["HandleSpace", "HandleRegion", "Membership", "MembershipStatus", "make_handle",
           "handle_region", "handle_membership", "induced_form", "attaching_belt_reports",
           "round_handle_report", "proportional"]

HALF = Fraction(1, 2)
MEMBERSHIP_TOL = 1e-9
POINT_BUDGET = 600_000


def handle_chart(m: int) -> Chart:
    return Chart.of([(f"p{i}", LINEAR) for i in range(1, m + 1)]
                    + [(f"q{i}", LINEAR) for i in range(1, m + 1)]
                    + [("z", LINEAR), ("phi", ANGLE)])


@dataclass
class HandleSpace:
    m: int
    k: int
    chart: Chart
    omega0: DifferentialForm
    X: VectorField

    def p(self, i: int) -> int:
        return i - 1

    def q(self, i: int) -> int:
        return self.m + i - 1

    @property
    def lam(self) -> DifferentialForm:
        return interior(self.X, self.omega0)


def make_handle(m: int, k: int) -> HandleSpace:
    if m < 1:
        raise BadIndex(f"half-dimension must be at least 1, got {m}")
    if not 1 <= k <= m:
        raise BadIndex(f"index must satisfy 1 <= k <= {m}, got {k}")
    ch = handle_chart(m)
    om = DifferentialForm.basis(ch, "z", "phi")
    for i in range(1, m + 1):
        om = om + DifferentialForm.basis(ch, i - 1, m + i - 1)
    comps = {ch.index("z"): _x(ch.index("z"))}
    for i in range(1, m + 1):
        p, q = i - 1, m + i - 1
        if i <= k:
            comps[p] = _x(p) * 2
            comps[q] = -_x(q)
        else:
            comps[p] = _x(p) * HALF
            comps[q] = _x(q) * HALF
    return HandleSpace(m, k, ch, om, VectorField(ch, comps))


def liouville_primitive(h: HandleSpace) -> DifferentialForm:
    """``sum_{i<=k}(2 p_i dq_i + q_i dp_i) + 1/2 sum_{i>k}(p_i dq_i - q_i dp_i) + z dphi``."""
    ch = h.chart
    out = DifferentialForm.basis(ch, "phi") * _x(ch.index("z"))
    for i in range(1, h.m + 1):
        p, q = h.p(i), h.q(i)
        if i <= h.k:
            out = out + DifferentialForm.basis(ch, q) * (_x(p) * 2) + DifferentialForm.basis(ch, p) * _x(q)
        else:
            out = out + (DifferentialForm.basis(ch, q) * _x(p) - DifferentialForm.basis(ch, p) * _x(q)) * HALF
    return out


# --------------------------------------------------------------------------
# region and membership

@dataclass
class HandleRegion:
    handle: HandleSpace
    A: float = 2.0
    B: float = 1.0
    c: float = 1.0
    f: ScalarExpr = field(init=False)
    g: ScalarExpr = field(init=False)

    def __post_init__(self):
        h = self.handle
        f = _x(h.chart.index("z"), 2) * HALF
        g = ScalarExpr()
        bsum = _x(h.chart.index("z"), 2)
        A = Fraction(self.A).limit_denominator(10 ** 9)
        B = Fraction(self.B).limit_denominator(10 ** 9)
        for i in range(1, h.m + 1):
            p, q = h.p(i), h.q(i)
            if i <= h.k:
                f = f - _x(q, 2) * HALF + _x(p, 2)
                g = g - _x(q, 2) * A
                bsum = bsum + _x(p, 2)
            else:
                f = f + (_x(q, 2) + _x(p, 2)) * Fraction(1, 4)
                bsum = bsum + _x(q, 2) + _x(p, 2)
        self.f = f
        self.g = g + bsum * B

    def values(self, point: Sequence[float]) -> tuple[float, float]:
        from .scalar import evaluate
        return evaluate(self.f, point), evaluate(self.g, point)

    def constraints(self) -> list[ScalarExpr]:
        c = Fraction(self.c).limit_denominator(10 ** 9)
        return [self.f + 1, ScalarExpr.const(c) - self.g]


class MembershipStatus(str, enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class Membership:
    status: MembershipStatus
    faces: tuple[str, ...] = ()


def handle_region(h: HandleSpace, A: float = 2.0, B: float = 1.0, c: float = 1.0) -> HandleRegion:
    return HandleRegion(h, A, B, c)


def handle_membership(hr: HandleRegion, point: Sequence[float], tol: float = MEMBERSHIP_TOL
                      ) -> Membership:
    """Both faces are closed: a point within ``tol`` of either is on the boundary."""
    f, g = hr.values(point)
    faces = []
    if abs(f + 1.0) <= tol:
        faces.append("W-")
    if abs(g - hr.c) <= tol:
        faces.append("V_c")
    if faces:
        return Membership(MembershipStatus.BOUNDARY, tuple(faces))
    if f >= -1.0 and g <= hr.c:
        return Membership(MembershipStatus.INSIDE)
    return Membership(MembershipStatus.OUTSIDE)


# --------------------------------------------------------------------------
# induced forms

def _slice_expr(e: ScalarExpr, chart: Chart, level: Mapping[str, object]) -> ScalarExpr:
    fixed = {chart.index(k): v for k, v in level.items()}
    for i, v in fixed.items():
        e = e.substitute(i, Exact.coerce(v))
    keep = [i for i in range(chart.dim) if i not in fixed]
    return e.reindex({old: new for new, old in enumerate(keep)})


def _box_res(chart: Chart, grid: int) -> int:
    """Per-axis resolution capped so a full box grid stays under POINT_BUDGET nodes."""
    axes = sum(1 for nm in chart.names if nm != "phi")
    return min(grid, max(3, int(POINT_BUDGET ** (1.0 / max(axes, 1)) + 1e-9)))


def _slice_region(hr: HandleRegion | None, chart: Chart, level: Mapping[str, object],
                  grid: int, seed: int, extra: Sequence[ScalarExpr] = ()) -> Region:
    sub = chart.drop([chart.index(k) for k in level])
    bounds = {nm: (-1.0, 1.0) for nm in sub.names if nm != "phi"}
    cons = [] if hr is None else [_slice_expr(c, chart, level) for c in hr.constraints()]
    return Region(sub, bounds, constraints=cons + list(extra), resolution=_box_res(sub, grid),
                  angle_resolution=1, seed=seed)


def induced_form(h: HandleSpace, level: Mapping[str, object], hr: HandleRegion | None = None,
                 *, grid: int = 9, seed: int = DEFAULT_SEED):
    """``(X -| omega_0)`` restricted to a coordinate level, with its classification."""
    if len(level) != 1:
        raise ValueError("level must fix exactly one coordinate")
    (name, val), = level.items()
    i = h.chart.index(name)
    normal = _slice_expr(h.X[i], h.chart, level)
    sub = h.chart.drop([i])
    rg = _slice_region(hr, h.chart, level, grid, seed)
    pts = rg.grid(normal.coords_used())
    nv, _ = kernels.eval_grid([normal], pts, dim=sub.dim)
    if not normal.terms or np.any(np.abs(nv[:, 0]) <= 1e-12):
        raise NotTransverse(f"X_{h.k} is tangent to {{{name} = {val}}}")
    alpha = restrict(h.lam, level)
    top = wedge_power(h.omega0, h.m + 1)
    vol = restrict(interior(h.X, top), level)
    return alpha, classify(alpha, rg, vol)


# --------------------------------------------------------------------------
# characteristic foliations and dividing sets

def proportional(computed: VectorField, reference: VectorField, seed: int = DEFAULT_SEED
                 ) -> tuple[bool, Fraction | None]:
    """Is ``computed = c * reference`` for a nonzero rational constant ``c``?"""
    for i, comp in reference.components.items():
        rc = comp.constant_value()
        if rc is None or rc == 0:
            continue
        cc = computed.components.get(i, ScalarExpr()).constant_value()
        if cc is None or cc == 0:
            return False, None
        lam = cc / rc
        diff = computed - reference * lam
        ok = all(not c.terms for c in diff.components.values())
        return ok, (lam if ok else None)
    return False, None


def _pair(Y: VectorField, alpha: DifferentialForm) -> ScalarExpr:
    return interior(Y, alpha).components.get((), ScalarExpr())


def _top(chart: Chart, sign: int = 1) -> DifferentialForm:
    return DifferentialForm.basis(chart, *range(chart.dim)) * sign


def _field(chart: Chart, comps: Mapping[str, object]) -> VectorField:
    out = {}
    for nm, v in comps.items():
        out[chart.index(nm)] = v if isinstance(v, ScalarExpr) else ScalarExpr.const(v)
    return VectorField(chart, out)


def _defining(nc: NamedConstruction, label: str, alpha: DifferentialForm, level, omega, V,
              seed: int) -> None:
    m = (alpha.chart.dim - 1) // 2
    beta = restrict(wedge(alpha, wedge_power(ext_d(alpha), m - 1)), level)
    nc.checks.append(symbolic_check(f"{label}: V -| Omega = alpha ^ (d alpha)^(m-1)",
                                    interior(V, omega), beta, seed=seed))


def _sheet_compare(nc: NamedConstruction, label: str, V: VectorField, ref: VectorField, sign: int,
                   seed: int, assert_plus: bool = True) -> None:
    ok, lam = proportional(V, ref, seed)
    payload = {"computed": V.to_text(), "expected": ref.to_text(),
               "factor": str(lam) if lam is not None else None,
               "volume": "coordinate top form in chart order"}
    if sign > 0 and assert_plus:
        nc.checks.append(truth_check(f"{label}: V matches up to a constant", ok, payload, grid=False))
    else:
        nc.observations.append(Observation(f"{label}: V against the unsigned formula",
                                           {"proportional": ok, **payload}))


def attaching_belt_reports(h: HandleSpace, hr: HandleRegion, nc: NamedConstruction, *,
                           grid: int = 9, seed: int = DEFAULT_SEED) -> None:
    if h.k != 1:
        raise BadIndex("attaching and belt charts are written for index 1")
    _attaching(h, hr, nc, grid, seed)
    _belt(h, hr, nc, grid, seed)


def _std_sum(chart: Chart, m: int, skip: int | None = None) -> DifferentialForm:
    out = DifferentialForm.zero(chart, 1)
    for j in range(2, m + 1):
        if j == skip:
            continue
        p, q = chart.index(f"p{j}"), chart.index(f"q{j}")
        out = out + (DifferentialForm.basis(chart, q) * _x(p) - DifferentialForm.basis(chart, p) * _x(q)) * HALF
    return out


def _attaching(h: HandleSpace, hr: HandleRegion, nc: NamedConstruction, grid: int, seed: int) -> None:
    m = h.m
    for sign in (1, -1):
        alpha, cl = induced_form(h, {"q1": sign}, hr, grid=grid, seed=seed)
        ch = alpha.chart
        exp = (DifferentialForm.basis(ch, "p1") * sign + DifferentialForm.basis(ch, "phi") * _x(ch.index("z"))
               + _std_sum(ch, m))
        tag = "A+" if sign > 0 else "A-"
        nc.checks.append(symbolic_check(f"induced form on {tag}", alpha, exp, seed=seed))
        nc.checks.append(truth_check(f"{tag} is contact", cl.kind is ContactClass.CONTACT,
                                     {"class": cl.kind.value, **cl.certificate.payload}))
    alpha, _ = induced_form(h, {"q1": 1}, hr, grid=grid, seed=seed)
    ch = alpha.chart
    z = ch.index("z")
    # characteristic foliations on the boundary charts of A+
    for s in (1, -1):
        lvl = {"p1": s}
        sub = ch.drop([ch.index("p1")])
        pieces = [DifferentialForm.basis(sub, f"p{j}", f"q{j}") for j in range(2, m + 1)]
        top = DifferentialForm.basis(sub, "z", "phi")
        for piece in reversed(pieces):
            top = wedge(piece, top)
        omega = top * s
        V = char_foliation(alpha, lvl, omega)
        sname = "+" if s > 0 else "-"
        _defining(nc, f"A+ chart p1={sname}1", alpha, lvl, omega, V, seed)
        comps = {"z": _x(sub.index("z")) * s}
        for j in range(2, m + 1):
            comps[f"p{j}"] = _x(sub.index(f"p{j}")) * (HALF * s)
            comps[f"q{j}"] = _x(sub.index(f"q{j}")) * (HALF * s)
        ref = _field(sub, comps)
        fact = math.factorial(m - 1)
        nc.checks.append(symbolic_check(f"A+ chart p1={sname}1: V = (m-1)! x reference", V,
                                        ref * fact, seed=seed))
        nc.observations.append(Observation(f"A+ chart p1={sname}1 factor",
                                           {"factor": fact, "exact_at_m_2": m == 2}))
    for j in range(2, m + 1):
        for s in (1, -1):
            sname = "+" if s > 0 else "-"
            for coord, ref_comps in ((f"p{j}", {f"q{j}": -1, "p1": HALF}),
                                     (f"q{j}", {f"p{j}": 1, "p1": HALF})):
                lvl = {coord: s}
                sub = ch.drop([ch.index(coord)])
                omega = _top(sub)
                V = char_foliation(alpha, lvl, omega)
                label = f"A+ chart {coord}={sname}1"
                _defining(nc, label, alpha, lvl, omega, V, seed)
                _sheet_compare(nc, label, V, _field(sub, ref_comps), s, seed)
    for s in (1, -1):
        sname = "+" if s > 0 else "-"
        lvl = {"z": s}
        sub = ch.drop([z])
        omega = _top(sub)
        V = char_foliation(alpha, lvl, omega)
        label = f"A+ chart z={sname}1"
        _defining(nc, label, alpha, lvl, omega, V, seed)
        _sheet_compare(nc, label, V, _field(sub, {"p1": 1, "phi": -1}), s, seed)
    # dividing set {p1 = 0}
    comps = {"p1": _x(ch.index("p1")), "z": _x(z)}
    for j in range(2, m + 1):
        comps[f"p{j}"] = _x(ch.index(f"p{j}")) * HALF
        comps[f"q{j}"] = _x(ch.index(f"q{j}")) * HALF
    Y = _field(ch, comps)
    nc.checks.append(symbolic_check("attaching: L_Y alpha = alpha", lie_derivative(Y, alpha), alpha,
                                    seed=seed))
    nc.checks.append(symbolic_check("attaching: alpha(Y) = p1", _pair(Y, alpha),
                                    _x(ch.index("p1")), seed=seed))
    region = Region(ch, {nm: (-1.0, 1.0) for nm in ch.names if nm != "phi"},
                    resolution=_box_res(ch, grid), angle_resolution=1, seed=seed)
    _dividing(nc, "attaching", ch, alpha, Y, region,
              [{"p1": 1}, {"p1": -1}]
              + [{f"p{j}": s} for j in range(2, m + 1) for s in (1, -1)]
              + [{f"q{j}": s} for j in range(2, m + 1) for s in (1, -1)]
              + [{"z": 1}, {"z": -1}], ch.index("p1"))


def _dividing(nc: NamedConstruction, tag: str, ch: Chart, alpha, Y, region, levels,
              p1: int | None) -> None:
    results = {}
    ok = True
    cell = region.cell(p1) if p1 is not None else 0.0
    for lvl in levels:
        (k, v), = lvl.items()
        rep = dividing_set(lvl, alpha, Y, region)
        zs = rep.zeros
        key = f"{k}={v}"
        if p1 is None or k == "p1":
            good = not zs
        else:
            good = bool(zs) and all(abs(pt[p1]) <= cell + 1e-12 for pt in zs)
        ok &= good
        results[key] = {"zeros": len(zs), "U_plus": rep.positive, "U_minus": rep.negative,
                        "ok": good}
    nc.checks.append(truth_check(f"{tag}: dividing set is {{p1 = 0}}", ok,
                                 {"charts": results, "pairing": "p1"}))


def _belt(h: HandleSpace, hr: HandleRegion, nc: NamedConstruction, grid: int, seed: int) -> None:
    m = h.m
    for s in (1, -1):
        sname = "+" if s > 0 else "-"
        alpha = restrict(h.lam, {"p1": s})
        ch = alpha.chart
        exp = (DifferentialForm.basis(ch, "q1") * (2 * s) + _std_sum(ch, m)
               + DifferentialForm.basis(ch, "phi") * _x(ch.index("z")))
        nc.checks.append(symbolic_check(f"induced form on B1{sname}", alpha, exp, seed=seed))
        _belt_contact(nc, h, {"p1": s}, f"B1{sname}", grid, seed)
        sub = ch.drop([ch.index("q1")])
        top = DifferentialForm.basis(sub, "z", "phi")
        for j in range(m, 1, -1):
            top = wedge(DifferentialForm.basis(sub, f"p{j}", f"q{j}"), top)
        omega = top * (-s)
        V = char_foliation(alpha, {"q1": 0}, omega)
        _defining(nc, f"belt core in B1{sname}", alpha, {"q1": 0}, omega, V, seed)
        zc = {"z": _x(sub.index("z"))}
        idx_i = dict(zc)
        idx_2 = dict(zc)
        for j in range(2, m + 1):
            idx_i[f"p{j}"] = _x(sub.index(f"p{j}")) * (-s * HALF)
            idx_i[f"q{j}"] = _x(sub.index(f"q{j}")) * (-s * HALF)
        if m >= 2:
            idx_2["p2"] = _x(sub.index("p2")) * (-s * HALF * (m - 1))
            idx_2["q2"] = _x(sub.index("q2")) * (-s * HALF * (m - 1))
        nc.observations.append(Observation(f"belt core in B1{sname}", {
            "computed": V.to_text(),
            "index_i_reading": _field(sub, idx_i).to_text(),
            "index_2_reading": _field(sub, idx_2).to_text(),
            "matches_index_i_reading": V == _field(sub, idx_i),
            "matches_index_2_reading": V == _field(sub, idx_2),
            "proportional_to_index_i_reading": proportional(V, _field(sub, idx_i))[0]}))
        Y = _field(ch, {"q1": 1})
        nc.checks.append(symbolic_check(f"B1{sname}: L_Y alpha = 0", lie_derivative(Y, alpha),
                                        DifferentialForm.zero(ch, 1), seed=seed))
        nc.checks.append(symbolic_check(f"B1{sname}: alpha(Y) = {2 * s}", _pair(Y, alpha),
                                        ScalarExpr.const(2 * s), seed=seed))
        region = Region(ch, {nm: (-1.0, 1.0) for nm in ch.names if nm != "phi"},
                        resolution=_box_res(ch, grid), angle_resolution=1, seed=seed)
        _dividing(nc, f"B1{sname}", ch, alpha, Y, region, [{"q1": 0}], None)
    for j in range(2, m + 1):
        for s in (1, -1):
            sname = "+" if s > 0 else "-"
            for coord, dterm, ycomp in ((f"p{j}", f"q{j}", lambda ch: {"q1": 1, f"q{j}": _x(ch.index("p1")) * (-2 * s)}),
                                        (f"q{j}", f"p{j}", lambda ch: {"q1": 1, f"p{j}": _x(ch.index("p1")) * (2 * s)})):
                alpha = restrict(h.lam, {coord: s})
                ch = alpha.chart
                p1, q1 = ch.index("p1"), ch.index("q1")
                lead = 1 if coord.startswith("p") else -1
                exp = (DifferentialForm.basis(ch, "p1") * _x(q1) + DifferentialForm.basis(ch, "q1") * (_x(p1) * 2)
                       + DifferentialForm.basis(ch, dterm) * (HALF * s * lead) + _std_sum(ch, m, skip=j)
                       + DifferentialForm.basis(ch, "phi") * _x(ch.index("z")))
                tag = f"B{coord}{sname}"
                nc.checks.append(symbolic_check(f"induced form on {tag}", alpha, exp, seed=seed))
                _belt_contact(nc, h, {coord: s}, tag, grid, seed)
                _belt_core(nc, alpha, tag, {"p1": HALF}, s, seed)
                Y = _field(ch, ycomp(ch))
                _belt_dividing(nc, tag, ch, alpha, Y, grid, seed)
    for s in (1, -1):
        sname = "+" if s > 0 else "-"
        alpha = restrict(h.lam, {"z": s})
        ch = alpha.chart
        p1, q1 = ch.index("p1"), ch.index("q1")
        exp = (DifferentialForm.basis(ch, "p1") * _x(q1) + DifferentialForm.basis(ch, "q1") * (_x(p1) * 2)
               + _std_sum(ch, m) + DifferentialForm.basis(ch, "phi") * s)
        tag = f"Bz{sname}"
        nc.checks.append(symbolic_check(f"induced form on {tag}", alpha, exp, seed=seed))
        _belt_contact(nc, h, {"z": s}, tag, grid, seed)
        _belt_core(nc, alpha, tag, {"p1": 1}, s, seed)
        Y = _field(ch, {"q1": 1, "phi": _x(p1) * (-s)})
        _belt_dividing(nc, tag, ch, alpha, Y, grid, seed)


def _belt_contact(nc, h, level, tag, grid, seed) -> None:
    _, cl = induced_form(h, level, None, grid=grid, seed=seed)
    nc.checks.append(truth_check(f"{tag} is contact", cl.kind is ContactClass.CONTACT,
                                 {"class": cl.kind.value, **cl.certificate.payload}))


def _belt_core(nc, alpha, tag, ref_comps, s, seed) -> None:
    ch = alpha.chart
    lvl = {"q1": 0}
    sub = ch.drop([ch.index("q1")])
    omega = _top(sub)
    V = char_foliation(alpha, lvl, omega)
    label = f"belt core in {tag}"
    _defining(nc, label, alpha, lvl, omega, V, seed)
    ok, lam = proportional(V, _field(sub, ref_comps), seed)
    nc.checks.append(truth_check(f"{label}: V matches up to a constant", ok, {
        "computed": V.to_text(), "expected": _field(sub, ref_comps).to_text(),
        "factor": str(lam) if lam is not None else None}, grid=False))


def _belt_dividing(nc, tag, ch, alpha, Y, grid, seed) -> None:
    nc.checks.append(symbolic_check(f"{tag}: L_Y alpha = 0", lie_derivative(Y, alpha),
                                    DifferentialForm.zero(ch, 1), seed=seed))
    nc.checks.append(symbolic_check(f"{tag}: alpha(Y) = p1", _pair(Y, alpha),
                                    _x(ch.index("p1")), seed=seed))
    region = Region(ch, {nm: (-1.0, 1.0) for nm in ch.names if nm != "phi"},
                    resolution=_box_res(ch, grid), angle_resolution=1, seed=seed)
    _dividing(nc, tag, ch, alpha, Y, region, [{"q1": 0}], ch.index("p1"))


# --------------------------------------------------------------------------

def round_handle_report(m: int, k: int = 1, *, A: float = 2.0, B: float = 1.0, c: float = 1.0,
                        grid: int = 9, seed: int = DEFAULT_SEED) -> NamedConstruction:
    h = make_handle(m, k)
    hr = handle_region(h, A, B, c)
    nc = NamedConstruction("round-handle", h.chart, {"omega0": h.omega0}, aux={"X": h.X, "region": hr},
                           parameters={"m": m, "k": k, "A": A, "B": B, "c": c, "grid": grid})
    nc.checks.append(symbolic_check("d omega0 = 0", ext_d(h.omega0),
                                    DifferentialForm.zero(h.chart, 3), seed=seed))
    nc.checks.append(symbolic_check("L_X omega0 = omega0", lie_derivative(h.X, h.omega0), h.omega0,
                                    seed=seed))
    nc.checks.append(symbolic_check("X -| omega0", h.lam, liouville_primitive(h), seed=seed))
    box = Region(h.chart, {nm: (-2.0, 2.0) for nm in h.chart.names if nm != "phi"},
                 resolution=_box_res(h.chart, 5), angle_resolution=1, seed=seed)
    pts = box.grid()
    cv, _ = kernels.eval_grid(hr.constraints(), pts, dim=h.chart.dim)
    mask = np.all(cv >= 0.0, axis=1)
    nc.checks.append(truth_check("handle region non-empty", bool(mask.any()),
                                 {"samples": int(len(pts)), "inside": int(mask.sum())}))
    origin = handle_membership(hr, [0.0] * h.chart.dim)
    nc.checks.append(truth_check("origin is inside", origin.status is MembershipStatus.INSIDE,
                                 {"status": origin.status.value}, grid=False))
    if k == 1:
        attaching_belt_reports(h, hr, nc, grid=grid, seed=seed)
    return nc
