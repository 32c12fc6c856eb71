"""Sparse differential forms and vector fields over a single chart."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .chart import Chart
from .errors import (BadAssignment, ChartMismatch, DegreeZero, NotTopDegree,
                     PoleOnRegion, ZeroVolume)
from .scalar import (COORD, Atom, Exact, ScalarExpr, coord, differentiate,
                     evaluate, to_text, _check_atom)

__all__ = [
    "DifferentialForm", "VectorField", "DiagonalMetric",
    "wedge", "wedge_power", "ext_d", "interior", "restrict", "hodge_star",
    "lie_derivative", "top_ratio", "pullback", "perm_sign",
]


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq))
                     if seq[a] > seq[b])
    return -1 if inversions & 1 else 1


def _lift(x) -> ScalarExpr:
    return x if isinstance(x, ScalarExpr) else ScalarExpr.const(x)


def _validate(chart: Chart, e: ScalarExpr) -> None:
    for k, _ in e.terms:
        for atom in k:
            _check_atom(atom, chart)


class DifferentialForm:
    """Degree-``p`` form ``sum_I f_I dx_I`` with strictly increasing ``I``."""

    __slots__ = ("chart", "degree", "components")

    def __init__(self, chart: Chart, degree: int,
                 components: Mapping[tuple[int, ...], ScalarExpr] | None = None,
                 *, check: bool = True):
        if not 0 <= degree:
            raise ValueError("negative degree")
        self.chart = chart
        self.degree = degree
        comps: dict[tuple[int, ...], ScalarExpr] = {}
        for key, val in (components or {}).items():
            key = tuple(key)
            val = _lift(val)
            if not val.terms:
                continue
            if check:
                if len(key) != degree or any(not 0 <= i < chart.dim for i in key):
                    raise ValueError(f"bad index tuple {key} for degree {degree}")
                if any(a >= b for a, b in zip(key, key[1:])):
                    raise ValueError(f"index tuple {key} not strictly increasing")
                _validate(chart, val)
            comps[key] = val
        self.components = dict(sorted(comps.items()))

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DifferentialForm":
        return cls(chart, degree)

    @classmethod
    def function(cls, chart: Chart, f) -> "DifferentialForm":
        return cls(chart, 0, {(): _lift(f)})

    @classmethod
    def basis(cls, chart: Chart, *indices: int | str) -> "DifferentialForm":
        """``dx_{i1} ^ ... ^ dx_{ip}`` for coordinate indices or names."""
        idx = [chart.resolve(i) for i in indices]
        s = perm_sign(idx)
        if s == 0:
            return cls(chart, len(idx))
        return cls(chart, len(idx), {tuple(sorted(idx)): ScalarExpr.const(s)})

    @classmethod
    def from_terms(cls, chart: Chart, degree: int,
                   terms: Iterable[tuple[Sequence[int | str], ScalarExpr]]) -> "DifferentialForm":
        out = cls(chart, degree)
        for idx, f in terms:
            out = out + _lift(f) * cls.basis(chart, *idx)
        return out

    # -- structure -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.components

    def coefficient(self, *indices: int | str) -> ScalarExpr:
        idx = [self.chart.resolve(i) for i in indices]
        s = perm_sign(idx)
        if s == 0:
            return ScalarExpr()
        return self.components.get(tuple(sorted(idx)), ScalarExpr()) * s

    def _same(self, other: "DifferentialForm") -> None:
        if not isinstance(other, DifferentialForm):
            raise TypeError(f"expected a form, got {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatch(f"{self.chart} vs {other.chart}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (self.chart == other.chart and self.degree == other.degree
                and self.components == other.components)

    def __hash__(self):
        return hash((self.chart, self.degree, tuple(self.components.items())))

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._same(other)
        if other.degree != self.degree:
            raise ValueError(f"degree {self.degree} + degree {other.degree}")
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps[k] + v if k in comps else v
        return DifferentialForm(self.chart, self.degree, comps, check=False)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(self.chart, self.degree,
                                {k: -v for k, v in self.components.items()}, check=False)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def __mul__(self, f) -> "DifferentialForm":
        if isinstance(f, DifferentialForm):
            return NotImplemented
        f = _lift(f)
        _validate(self.chart, f)
        return DifferentialForm(self.chart, self.degree,
                                {k: v * f for k, v in self.components.items()}, check=False)

    __rmul__ = __mul__

    def __xor__(self, other: "DifferentialForm") -> "DifferentialForm":
        return wedge(self, other)

    def map_coefficients(self, f) -> "DifferentialForm":
        return DifferentialForm(self.chart, self.degree,
                                {k: f(v) for k, v in self.components.items()})

    def evaluate(self, point: Sequence[float], profiles=None) -> dict[tuple[int, ...], float]:
        return {k: evaluate(v, point, profiles) for k, v in self.components.items()}

    def to_text(self, names: bool = True) -> str:
        if not self.components:
            return "0"
        nm = self.chart.names if names else None
        parts = []
        for k, v in self.components.items():
            basis = "^".join("d" + (self.chart.names[i] if names else f"x{i}") for i in k)
            parts.append(f"({to_text(v, nm)})" + (f" {basis}" if basis else ""))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"DifferentialForm[{self.degree}]({self.to_text()})"


class VectorField:
    """``sum_i X_i d/dx_i``."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Mapping[int | str, ScalarExpr] | None = None):
        self.chart = chart
        comps: dict[int, ScalarExpr] = {}
        for key, val in (components or {}).items():
            i = chart.resolve(key)
            val = _lift(val)
            if val.terms:
                _validate(chart, val)
                comps[i] = comps[i] + val if i in comps else val
        self.components = dict(sorted((i, v) for i, v in comps.items() if v.terms))

    def __getitem__(self, i: int | str) -> ScalarExpr:
        return self.components.get(self.chart.resolve(i), ScalarExpr())

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.chart == other.chart and self.components == other.components

    def __hash__(self):
        return hash((self.chart, tuple(self.components.items())))

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.chart != self.chart:
            raise ChartMismatch(f"{self.chart} vs {other.chart}")
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps[k] + v if k in comps else v
        return VectorField(self.chart, comps)

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, {k: -v for k, v in self.components.items()})

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __mul__(self, f) -> "VectorField":
        f = _lift(f)
        return VectorField(self.chart, {k: v * f for k, v in self.components.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.components

    def evaluate(self, point: Sequence[float], profiles=None) -> list[float]:
        out = [0.0] * self.chart.dim
        for i, v in self.components.items():
            out[i] = evaluate(v, point, profiles)
        return out

    def to_text(self) -> str:
        if not self.components:
            return "0"
        names = self.chart.names
        return " + ".join(f"({to_text(v, names)}) d/d{names[i]}"
                          for i, v in self.components.items())

    def __repr__(self) -> str:
        return f"VectorField({self.to_text()})"


class DiagonalMetric:
    """Diagonal metric ``sum g_ii dx_i^2``.

    ``sqrt_entries`` defaults to exact monomial square roots of the entries.
    """

    __slots__ = ("chart", "entries", "sqrt_entries")

    def __init__(self, chart: Chart, entries: Sequence, sqrt_entries: Sequence | None = None):
        if len(entries) != chart.dim:
            raise ValueError(f"{len(entries)} metric entries for dim {chart.dim}")
        self.chart = chart
        self.entries = tuple(_lift(e) for e in entries)
        if any(not e.terms for e in self.entries):
            raise PoleOnRegion("metric entry is identically zero")
        if sqrt_entries is None:
            try:
                sqrt_entries = [e.sqrt() for e in self.entries]
            except ValueError as exc:
                raise ValueError(f"pass sqrt_entries explicitly: {exc}") from None
        self.sqrt_entries = tuple(_lift(e) for e in sqrt_entries)

    @classmethod
    def euclidean(cls, chart: Chart) -> "DiagonalMetric":
        return cls(chart, [1] * chart.dim)

    @classmethod
    def cylindrical(cls, chart: Chart) -> "DiagonalMetric":
        """``dx^2`` for non-angles, ``r^2 dtheta^2`` for an angle preceded by a radius."""
        entries = []
        for i, (_, kind) in enumerate(chart.coords):
            if kind.tag == "angle" and i > 0 and chart.kind(i - 1).tag == "radial":
                entries.append(ScalarExpr.atom(coord(i - 1, 2)))
            else:
                entries.append(ScalarExpr.const(1))
        return cls(chart, entries)

    def volume_density(self) -> ScalarExpr:
        out = ScalarExpr.const(1)
        for s in self.sqrt_entries:
            out = out * s
        return out

    def check_region(self, points: Iterable[Sequence[float]], tol: float = 1e-12) -> None:
        for pt in points:
            for i, g in enumerate(self.entries):
                if abs(evaluate(g, pt)) <= tol:
                    raise PoleOnRegion(
                        f"metric entry g_{self.chart.names[i]} vanishes at {list(pt)}")


# --------------------------------------------------------------------------
# operations

def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    a._same(b)
    p = a.degree + b.degree
    if p > a.chart.dim:
        return DifferentialForm(a.chart, p, check=False)
    out: dict[tuple[int, ...], ScalarExpr] = {}
    for I, f in a.components.items():
        for J, g in b.components.items():
            merged = I + J
            s = perm_sign(merged)
            if s == 0:
                continue
            key = tuple(sorted(merged))
            term = f * g if s > 0 else -(f * g)
            out[key] = out[key] + term if key in out else term
    return DifferentialForm(a.chart, p, out, check=False)


def wedge_power(a: DifferentialForm, n: int) -> DifferentialForm:
    if n < 0:
        raise ValueError("negative wedge power")
    out = DifferentialForm.function(a.chart, 1)
    for _ in range(n):
        out = wedge(out, a)
    return out


def ext_d(a: DifferentialForm) -> DifferentialForm:
    out: dict[tuple[int, ...], ScalarExpr] = {}
    for I, f in a.components.items():
        for j in sorted(f.coords_used()):
            if j in I:
                continue
            df = differentiate(f, j)
            if not df.terms:
                continue
            # dx_j ^ dx_I  ->  sign from moving dx_j past smaller indices
            s = -1 if sum(1 for i in I if i < j) & 1 else 1
            key = tuple(sorted(I + (j,)))
            term = df if s > 0 else -df
            out[key] = out[key] + term if key in out else term
    return DifferentialForm(a.chart, a.degree + 1, out, check=False)


def interior(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    if X.chart != a.chart:
        raise ChartMismatch(f"{X.chart} vs {a.chart}")
    if a.degree == 0:
        raise DegreeZero("interior product of a 0-form")
    out: dict[tuple[int, ...], ScalarExpr] = {}
    for I, f in a.components.items():
        for pos, i in enumerate(I):
            xi = X.components.get(i)
            if xi is None:
                continue
            key = I[:pos] + I[pos + 1:]
            term = xi * f if pos % 2 == 0 else -(xi * f)
            out[key] = out[key] + term if key in out else term
    return DifferentialForm(a.chart, a.degree - 1, out, check=False)


def lie_derivative(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan formula ``L_X a = d(i_X a) + i_X da``."""
    if X.chart != a.chart:
        raise ChartMismatch(f"{X.chart} vs {a.chart}")
    out = interior(X, ext_d(a))
    if a.degree > 0:
        out = out + ext_d(interior(X, a))
    return out


def _assignment_value(kind, v):
    if isinstance(v, Exact):
        return v
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return Exact.rat(v)
    if isinstance(v, float):
        return v
    raise BadAssignment(f"unsupported value {v!r}")


def restrict(a: DifferentialForm, assignment: Mapping[int | str, object]) -> DifferentialForm:
    """Pull back along the inclusion of a coordinate slice.

    Values may be rationals, :class:`Exact` constants, or floats; floats are
    accepted only for coordinates the coefficients do not depend on.
    """
    chart = a.chart
    fixed: dict[int, object] = {}
    for key, val in assignment.items():
        try:
            i = chart.resolve(key)
        except KeyError as exc:
            raise BadAssignment(str(exc)) from None
        val = _assignment_value(chart.kind(i), val)
        if not chart.kind(i).contains(float(val)):
            raise BadAssignment(f"{chart.names[i]}={val} outside its {chart.kind(i).tag} range")
        fixed[i] = val
    keep = [i for i in range(chart.dim) if i not in fixed]
    mapping = {old: new for new, old in enumerate(keep)}
    sub_chart = chart.drop(list(fixed))
    out: dict[tuple[int, ...], ScalarExpr] = {}
    for I, f in a.components.items():
        if any(i in fixed for i in I):
            continue
        for i, val in fixed.items():
            if i not in f.coords_used():
                continue
            if isinstance(val, float):
                raise BadAssignment(
                    f"inexact value for {chart.names[i]}, which the coefficients use")
            f = f.substitute(i, val)
        if f.terms:
            out[tuple(mapping[i] for i in I)] = f.reindex(mapping)
    return DifferentialForm(sub_chart, a.degree, out, check=False)


def hodge_star(a: DifferentialForm, g: DiagonalMetric, region_points=None) -> DifferentialForm:
    """``*dx_I = eps(I, I^c) sqrt(det g) (prod_{i in I} g_ii)^-1 dx_{I^c}``."""
    if g.chart != a.chart:
        raise ChartMismatch(f"{g.chart} vs {a.chart}")
    if region_points is not None:
        g.check_region(region_points)
    dim = a.chart.dim
    vol = g.volume_density()
    try:
        inv = [e.inverse() for e in g.entries]
    except ValueError as exc:
        raise PoleOnRegion(f"metric entry has no monomial inverse: {exc}") from None
    out: dict[tuple[int, ...], ScalarExpr] = {}
    for I, f in a.components.items():
        comp = tuple(i for i in range(dim) if i not in I)
        coef = vol * f
        for i in I:
            coef = coef * inv[i]
        if perm_sign(I + comp) < 0:
            coef = -coef
        out[comp] = coef
    return DifferentialForm(a.chart, dim - a.degree, out, check=False)


def top_ratio(a: DifferentialForm, vol: DifferentialForm) -> ScalarExpr:
    """The unique ``f`` with ``a = f * vol`` for top-degree forms."""
    a._same(vol)
    dim = a.chart.dim
    if a.degree != dim or vol.degree != dim:
        raise NotTopDegree(f"degrees {a.degree}, {vol.degree} on a {dim}-dimensional chart")
    top = tuple(range(dim))
    v = vol.components.get(top)
    if v is None or not v.terms:
        raise ZeroVolume("volume form is zero")
    f = a.components.get(top, ScalarExpr())
    try:
        return f * v.inverse()
    except ValueError:
        raise ZeroVolume(f"volume density {to_text(v)} is not an invertible monomial") from None


def pullback(a: DifferentialForm, source: Chart, images: Sequence[ScalarExpr]) -> DifferentialForm:
    """Pull ``a`` back along ``y_j = images[j](x)`` with ``x`` in ``source``.

    Coefficients of ``a`` may only use coordinate-power atoms (negative powers
    need monomial images); trigonometric atoms are rejected.
    """
    if len(images) != a.chart.dim:
        raise ValueError(f"{len(images)} images for a {a.chart.dim}-dimensional target")
    images = [_lift(e) for e in images]
    dys = [DifferentialForm(source, 1, {(k,): differentiate(y, k)
                                        for k in sorted(y.coords_used())}) for y in images]

    def sub(b, e):
        if b.tag != COORD:
            raise BadAssignment(f"cannot pull back a non-polynomial atom in {a.chart}")
        return [(c, [Atom(bb, ee) for bb, ee in key]) for key, c in (images[b.index] ** e).terms]

    out = DifferentialForm(source, a.degree)
    for I, f in a.components.items():
        piece = DifferentialForm.function(source, f.map_bases(sub))
        for i in I:
            piece = wedge(piece, dys[i])
        out = out + piece
    return out
