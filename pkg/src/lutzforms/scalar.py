"""Canonical trigonometric-polynomial algebra for form coefficients.

A :class:`ScalarExpr` is a finite sum ``sum c_k * m_k`` with exact rational
coefficients ``c_k`` and monomials ``m_k`` built from atoms:

* ``x_i^e`` (coordinate powers),
* ``sin(u)^e`` and ``cos(u)^e`` with ``u`` either ``x_i`` or ``x_i^2``,
* ``norm(x_i, ..., x_j)^e``, the Euclidean norm of a group of coordinates,
* ``F[name;k](u)^e``, the ``k``-th derivative of an opaque one-variable
  profile, with ``u`` one of ``x_i``, ``x_i^2`` or a norm group.

The canonical form rewrites every monomial so that, for each trigonometric
argument ``u`` with exponents ``(a, b)`` on ``(sin u, cos u)``, either
``a in {0, 1}`` or ``a < 0 and b <= 1``.  The rewrites are
``s^a c^b -> s^(a-2) c^b - s^(a-2) c^(b+2)`` for ``a >= 2`` and
``s^a c^b -> s^a c^(b-2) - s^(a+2) c^(b-2)`` for ``a < 0 <= b - 2``, i.e.
``sin^2 + cos^2 = 1`` used in one direction only.  Norm powers ``>= 2`` are
expanded into sums of squares.  No other identity is applied.
"""
from __future__ import annotations

import enum
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .chart import Chart
from .errors import BadAssignment, DomainPole, IllFormedAtom

__all__ = [
    "Base", "Atom", "coord", "sin", "cos", "norm", "fn",
    "ScalarExpr", "canonicalize", "differentiate", "evaluate",
    "ZeroStatus", "ZeroTest", "is_zero", "Exact", "parse", "to_text",
    "POLE_TOL", "ZERO_TOL", "ZERO_SAMPLES", "DEFAULT_SEED",
]

COORD, NORM, SIN, COS, FN = 0, 1, 2, 3, 4
POLE_TOL = 1e-12
ZERO_TOL = 1e-9
ZERO_SAMPLES = 64
DEFAULT_SEED = 42


class Base(NamedTuple):
    """Exponent-free part of an atom; totally ordered via tuple comparison."""
    tag: int
    index: int = -1
    squared: bool = False
    name: str = ""
    order: int = 0
    group: tuple = ()

    def coords(self) -> tuple[int, ...]:
        return self.group if self.index < 0 else (self.index,)


class Atom(NamedTuple):
    base: Base
    exp: int


def coord(i: int, exp: int = 1) -> Atom:
    return Atom(Base(COORD, i), exp)


def sin(i: int, squared: bool = False, exp: int = 1) -> Atom:
    return Atom(Base(SIN, i, bool(squared)), exp)


def cos(i: int, squared: bool = False, exp: int = 1) -> Atom:
    return Atom(Base(COS, i, bool(squared)), exp)


def norm(indices: Iterable[int], exp: int = 1) -> Atom:
    group = tuple(sorted(set(indices)))
    if not group:
        raise IllFormedAtom("norm of an empty coordinate group")
    return Atom(Base(NORM, -1, False, "", 0, group), exp)


def fn(name: str, arg: int | Sequence[int], squared: bool = False,
       order: int = 0, exp: int = 1) -> Atom:
    """Opaque profile atom ``name^(order)(u)^exp``.

    ``arg`` is a coordinate index, or a sequence of indices meaning the norm
    of that group.
    """
    if not name or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
        raise IllFormedAtom(f"bad profile name {name!r}")
    if order < 0:
        raise IllFormedAtom("negative derivative order")
    if isinstance(arg, int):
        return Atom(Base(FN, arg, bool(squared), name, order), exp)
    group = tuple(sorted(set(arg)))
    if not group or squared:
        raise IllFormedAtom("profile of a norm takes a non-empty group, unsquared")
    return Atom(Base(FN, -1, False, name, order, group), exp)


def _check_atom(atom: Atom, chart: Chart | None) -> None:
    base, exp = atom
    if not isinstance(exp, int) or exp == 0:
        raise IllFormedAtom(f"exponent must be a nonzero integer, got {exp!r}")
    for i in base.coords():
        if i < 0 or (chart is not None and i >= chart.dim):
            raise IllFormedAtom(f"coordinate index {i} outside chart")
    if chart is None:
        return
    if base.tag == COORD:
        kind = chart.kind(base.index)
        if exp < 0 and not kind.allows_negative_power:
            raise IllFormedAtom(
                f"negative power of {kind.tag} coordinate {chart.names[base.index]}")
    if base.squared and not chart.kind(base.index).allows_square_arg:
        raise IllFormedAtom(
            f"squared argument on angle coordinate {chart.names[base.index]}")


# --------------------------------------------------------------------------
# monomial normalisation

def _merge(atoms: Iterable[Atom]) -> dict[Base, int]:
    acc: dict[Base, int] = {}
    for base, exp in atoms:
        acc[base] = acc.get(base, 0) + exp
    return {b: e for b, e in acc.items() if e != 0}


@lru_cache(maxsize=None)
def _trig_split(a: int, b: int) -> tuple[tuple[int, int, int], ...]:
    """Normal form of ``sin^a cos^b`` as ``((coef, a', b'), ...)``."""
    if a >= 2:
        first = _trig_split(a - 2, b)
        second = _trig_split(a - 2, b + 2)
    elif a < 0 and b >= 2:
        first = _trig_split(a, b - 2)
        second = _trig_split(a + 2, b - 2)
    else:
        return ((1, a, b),)
    acc: dict[tuple[int, int], int] = {}
    for c, x, y in first:
        acc[(x, y)] = acc.get((x, y), 0) + c
    for c, x, y in second:
        acc[(x, y)] = acc.get((x, y), 0) - c
    return tuple((c, x, y) for (x, y), c in sorted(acc.items()) if c)


@lru_cache(maxsize=200_000)
def _normalize_key(key: tuple) -> tuple[tuple[int, tuple], ...]:
    """Expand a merged monomial key into normal monomials with integer weights."""
    atoms = dict(key)
    # norm powers >= 2 become sums of squares
    for base, exp in list(atoms.items()):
        if base.tag == NORM and exp >= 2:
            del atoms[base]
            if exp > 2:
                atoms[base] = exp - 2
            out: dict[tuple, int] = {}
            for i in base.group:
                sub = dict(atoms)
                cb = Base(COORD, i)
                sub[cb] = sub.get(cb, 0) + 2
                k = tuple(sorted((b, e) for b, e in sub.items() if e != 0))
                for c, nk in _normalize_key(k):
                    out[nk] = out.get(nk, 0) + c
            return tuple((c, k) for k, c in sorted(out.items()) if c)
    args: dict[tuple, list[int]] = {}
    for base, exp in atoms.items():
        if base.tag in (SIN, COS):
            slot = args.setdefault((base.index, base.squared), [0, 0])
            slot[0 if base.tag == SIN else 1] = exp
    plain = tuple(sorted((b, e) for b, e in atoms.items() if b.tag not in (SIN, COS)))
    choices = []
    for (i, sq), (a, b) in sorted(args.items()):
        choices.append([(c, i, sq, x, y) for c, x, y in _trig_split(a, b)])
    out: dict[tuple, int] = {}
    for combo in product(*choices):
        coef = 1
        parts = list(plain)
        for c, i, sq, x, y in combo:
            coef *= c
            if x:
                parts.append((Base(SIN, i, sq), x))
            if y:
                parts.append((Base(COS, i, sq), y))
        k = tuple(sorted(parts))
        out[k] = out.get(k, 0) + coef
    return tuple((c, k) for k, c in sorted(out.items()) if c)


def _key_of(atoms: dict[Base, int]) -> tuple:
    return tuple(sorted(atoms.items()))


def _accumulate(acc: dict[tuple, Fraction], coef: Fraction, atoms: dict[Base, int]) -> None:
    for c, k in _normalize_key(_key_of(atoms)):
        v = acc.get(k, 0) + coef * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def _as_fraction(c) -> Fraction:
    if isinstance(c, bool):
        raise TypeError("boolean coefficient")
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


# --------------------------------------------------------------------------

class ScalarExpr:
    """Immutable canonical expression.  Build with :func:`canonicalize`."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: tuple = ()):
        # trusted constructor: ``terms`` must already be canonical
        self.terms: tuple[tuple[tuple, Fraction], ...] = terms
        self._hash = None

    @classmethod
    def _from_acc(cls, acc: dict[tuple, Fraction]) -> "ScalarExpr":
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def const(cls, c) -> "ScalarExpr":
        c = _as_fraction(c)
        return cls((((), c),)) if c else cls()

    @classmethod
    def atom(cls, a: Atom, chart: Chart | None = None) -> "ScalarExpr":
        return canonicalize([(1, [a])], chart)

    # -- structure -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero_form(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and self.terms[0][0] == ():
            return self.terms[0][1]
        return None

    def atoms(self) -> set[Base]:
        return {b for k, _ in self.terms for b, _ in k}

    def coords_used(self) -> set[int]:
        return {i for b in self.atoms() for i in b.coords()}

    def max_index(self) -> int:
        used = self.coords_used()
        return max(used) if used else -1

    def has_poles(self) -> bool:
        return any(e < 0 for k, _ in self.terms for _, e in k)

    def has_profiles(self) -> bool:
        return any(b.tag == FN for b in self.atoms())

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ScalarExpr.const(other)
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self) -> str:
        return f"ScalarExpr({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    # -- arithmetic ----------------------------------------------------
    @staticmethod
    def _lift(x) -> "ScalarExpr":
        if isinstance(x, ScalarExpr):
            return x
        return ScalarExpr.const(x)

    def __add__(self, other) -> "ScalarExpr":
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        acc = dict(self.terms)
        for k, v in other.terms:
            s = acc.get(k, 0) + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        return ScalarExpr._from_acc(acc)

    __radd__ = __add__

    def __neg__(self) -> "ScalarExpr":
        return ScalarExpr(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other) -> "ScalarExpr":
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ScalarExpr":
        return self._lift(other) - self

    def scale(self, c) -> "ScalarExpr":
        c = _as_fraction(c)
        if not c:
            return ScalarExpr()
        return ScalarExpr(tuple((k, v * c) for k, v in self.terms))

    def __mul__(self, other) -> "ScalarExpr":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        if not self.terms or not other.terms:
            return ScalarExpr()
        acc: dict[tuple, Fraction] = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                _accumulate(acc, v1 * v2, _merge(k1 + k2))
        return ScalarExpr._from_acc(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ScalarExpr":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ScalarExpr.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def inverse(self) -> "ScalarExpr":
        """Reciprocal of a single-term expression."""
        if len(self.terms) != 1:
            raise ValueError(f"cannot invert non-monomial {to_text(self)}")
        k, v = self.terms[0]
        atoms = {b: -e for b, e in k}
        acc: dict[tuple, Fraction] = {}
        _accumulate(acc, 1 / v, atoms)
        return ScalarExpr._from_acc(acc)

    def sqrt(self) -> "ScalarExpr":
        """Exact square root of a monomial with square coefficient and even powers."""
        if len(self.terms) != 1:
            raise ValueError(f"no exact square root for {to_text(self)}")
        k, v = self.terms[0]
        if v <= 0:
            raise ValueError(f"coefficient {v} is not positive")
        num, den = math.isqrt(v.numerator), math.isqrt(v.denominator)
        if num * num != v.numerator or den * den != v.denominator:
            raise ValueError(f"coefficient {v} is not a rational square")
        if any(e % 2 for _, e in k):
            raise ValueError(f"odd power in {to_text(self)}")
        acc: dict[tuple, Fraction] = {}
        _accumulate(acc, Fraction(num, den), {b: e // 2 for b, e in k})
        return ScalarExpr._from_acc(acc)

    # -- transformations -------------------------------------------------
    def map_bases(self, f: Callable[[Base, int], Iterable[tuple[Fraction, list[Atom]]] | None]
                  ) -> "ScalarExpr":
        """Replace each atom ``b^e`` by an expansion returned from ``f(b, e)``.

        ``f`` returns ``None`` to keep the atom, otherwise an iterable of
        ``(coef, atoms)`` pairs whose sum replaces it.
        """
        out = ScalarExpr()
        for k, v in self.terms:
            term = ScalarExpr.const(v)
            kept: list[Atom] = []
            for b, e in k:
                rep = f(b, e)
                if rep is None:
                    kept.append(Atom(b, e))
                else:
                    term = term * canonicalize(rep)
            if kept:
                term = term * canonicalize([(1, kept)])
            out = out + term
        return out

    def reindex(self, mapping: Mapping[int, int]) -> "ScalarExpr":
        """Rename coordinate indices; every used index must be mapped."""
        def ren(b: Base) -> Base:
            if b.index >= 0:
                return b._replace(index=mapping[b.index])
            return b._replace(group=tuple(sorted(mapping[i] for i in b.group)))
        acc: dict[tuple, Fraction] = {}
        for k, v in self.terms:
            _accumulate(acc, v, _merge(Atom(ren(b), e) for b, e in k))
        return ScalarExpr._from_acc(acc)

    def substitute(self, i: int, value: "Exact") -> "ScalarExpr":
        """Exact substitution ``x_i = value``; raises BadAssignment if not exact."""
        def sub(b: Base, e: int):
            if i not in b.coords():
                return None
            return [(_exact_atom_value(b, e, i, value), [])] if b.tag != NORM \
                else _norm_substitute(b, e, i, value)
        return self.map_bases(sub)


def canonicalize(raw, chart: Chart | None = None) -> ScalarExpr:
    """Canonical form of ``[(coef, [Atom, ...]), ...]``.

    A :class:`ScalarExpr` input is returned unchanged (idempotence).
    """
    if isinstance(raw, ScalarExpr):
        return raw
    acc: dict[tuple, Fraction] = {}
    for coef, atoms in raw:
        atoms = list(atoms)
        for a in atoms:
            _check_atom(a, chart)
        c = _as_fraction(coef)
        if c:
            _accumulate(acc, c, _merge(atoms))
    return ScalarExpr._from_acc(acc)


# --------------------------------------------------------------------------
# exact values for substitution

@dataclass(frozen=True)
class Exact:
    """Exact real constant: ``q``, ``q*pi`` or ``sqrt(q*pi)`` with rational q."""
    kind: str
    q: Fraction

    @classmethod
    def rat(cls, q) -> "Exact":
        return cls("rat", _as_fraction(q))

    @classmethod
    def pi(cls, q=1) -> "Exact":
        return cls("pi", _as_fraction(q))

    @classmethod
    def sqrt_pi(cls, q=1) -> "Exact":
        q = _as_fraction(q)
        if q < 0:
            raise ValueError("sqrt of a negative multiple of pi")
        return cls("sqrtpi", q)

    @classmethod
    def coerce(cls, v) -> "Exact":
        if isinstance(v, Exact):
            return v
        return cls.rat(v)

    def __float__(self) -> float:
        if self.kind == "rat":
            return float(self.q)
        if self.kind == "pi":
            return float(self.q) * math.pi
        return math.sqrt(float(self.q) * math.pi)

    def square(self) -> "Exact":
        if self.kind == "rat":
            return Exact.rat(self.q * self.q)
        if self.kind == "sqrtpi":
            return Exact.pi(self.q)
        raise BadAssignment(f"{self} squared is not representable")

    def __str__(self) -> str:
        if self.kind == "rat":
            return str(self.q)
        if self.kind == "pi":
            return f"{self.q}*pi"
        return f"sqrt({self.q}*pi)"


def _trig_exact(tag: int, arg: Exact) -> int:
    if arg.kind == "rat" and arg.q == 0:
        k = 0
    elif arg.kind == "pi" and (2 * arg.q).denominator == 1:
        k = int(2 * arg.q) % 4
    else:
        raise BadAssignment(f"{'sin' if tag == SIN else 'cos'}({arg}) is not rational")
    return (0, 1, 0, -1)[k] if tag == SIN else (1, 0, -1, 0)[k]


def _exact_atom_value(b: Base, e: int, i: int, value: Exact) -> Fraction:
    if b.tag == COORD:
        if value.kind != "rat":
            raise BadAssignment(f"coordinate value {value} is not rational")
        v = value.q
    elif b.tag in (SIN, COS):
        v = Fraction(_trig_exact(b.tag, value.square() if b.squared else value))
    else:
        raise BadAssignment(f"cannot substitute into profile {b.name}")
    if v == 0 and e < 0:
        raise BadAssignment(f"substitution x{i}={value} hits a pole")
    return v ** e


def _norm_substitute(b: Base, e: int, i: int, value: Exact):
    if value.kind != "rat" or value.q != 0:
        raise BadAssignment(f"cannot substitute {value} into a norm exactly")
    rest = tuple(j for j in b.group if j != i)
    if not rest:
        if e < 0:
            raise BadAssignment("norm vanishes at the substituted point")
        return [(0, [])]
    return [(1, [norm(rest, e)])]


# --------------------------------------------------------------------------
# differentiation

def _d_base(b: Base, i: int) -> list[tuple[Fraction, list[Atom]]]:
    """Partial derivative of the bare atom base (exponent one)."""
    if i not in b.coords():
        return []
    if b.tag == COORD:
        return [(1, [])]
    if b.tag == NORM:
        return [(1, [coord(i), Atom(b, -1)])]
    inner = [(2, [coord(i)])] if b.squared else [(1, [])]
    if b.tag == FN and b.index < 0:
        inner = [(1, [coord(i), Atom(b._replace(tag=NORM, name="", order=0), -1)])]
    if b.tag == SIN:
        outer = (1, Atom(b._replace(tag=COS), 1))
    elif b.tag == COS:
        outer = (-1, Atom(b._replace(tag=SIN), 1))
    else:
        outer = (1, Atom(b._replace(order=b.order + 1), 1))
    return [(outer[0] * c, [outer[1], *atoms]) for c, atoms in inner]


def differentiate(e: ScalarExpr, i: int) -> ScalarExpr:
    """Exact partial derivative with respect to coordinate ``i``."""
    acc: dict[tuple, Fraction] = {}
    for k, v in e.terms:
        for pos, (b, ex) in enumerate(k):
            db = _d_base(b, i)
            if not db:
                continue
            rest = [Atom(bb, ee) for j, (bb, ee) in enumerate(k) if j != pos]
            if ex != 1:
                rest.append(Atom(b, ex - 1))
            for c, atoms in db:
                _accumulate(acc, v * ex * c, _merge(rest + atoms))
    return ScalarExpr._from_acc(acc)


# --------------------------------------------------------------------------
# evaluation

Profiles = Mapping[str, Callable]


def _base_value(b: Base, x: Sequence[float], profiles: Profiles | None) -> float:
    if b.tag == COORD:
        return x[b.index]
    if b.tag == NORM:
        return math.sqrt(sum(x[j] * x[j] for j in b.group))
    if b.index >= 0:
        u = x[b.index] * x[b.index] if b.squared else x[b.index]
    else:
        u = math.sqrt(sum(x[j] * x[j] for j in b.group))
    if b.tag == SIN:
        return math.sin(u)
    if b.tag == COS:
        return math.cos(u)
    if profiles is None or b.name not in profiles:
        raise KeyError(f"no concrete profile registered for {b.name!r}")
    return float(profiles[b.name](u, b.order, x))


def evaluate(e: ScalarExpr, point: Sequence[float], profiles: Profiles | None = None) -> float:
    """IEEE double value of ``e`` at ``point``; raises DomainPole on poles."""
    total = 0.0
    cache: dict[Base, float] = {}
    for k, v in e.terms:
        term = float(v)
        for b, ex in k:
            val = cache.get(b)
            if val is None:
                val = cache[b] = _base_value(b, point, profiles)
            if ex < 0 and abs(val) <= POLE_TOL:
                raise DomainPole(f"{_atom_text(b, 1)} vanishes at {list(point)}")
            term *= val ** ex
        total += term
    return total


# --------------------------------------------------------------------------
# zero testing

class ZeroStatus(enum.Enum):
    SYMBOLIC_ZERO = "SymbolicZero"
    PROBABLY_ZERO = "ProbablyZero"
    NONZERO = "NonZero"


@dataclass(frozen=True)
class ZeroTest:
    status: ZeroStatus
    witness: tuple[float, ...] | None = None
    value: float | None = None

    @property
    def is_zero(self) -> bool:
        return self.status is not ZeroStatus.NONZERO

    def __bool__(self) -> bool:
        return self.is_zero


class _RandomProfiles(dict):
    """Independent pseudo-random values for every (profile, order, argument)."""

    def __init__(self, rng: random.Random):
        super().__init__()
        self._rng = rng
        self._memo: dict = {}

    def __contains__(self, name) -> bool:
        return True

    def __getitem__(self, name):
        def value(u, order, x):
            key = (name, order, round(u, 12))
            if key not in self._memo:
                self._memo[key] = self._rng.uniform(0.5, 2.0)
            return self._memo[key]
        return value


def sample_point(rng: random.Random, dim: int, chart: Chart | None) -> list[float]:
    pt = []
    for j in range(dim):
        if chart is not None and j < chart.dim:
            lo, hi = chart.kind(j).default_range()
            if chart.kind(j).tag == "radial":
                lo = max(lo, 0.05)
        else:
            lo, hi = 0.05, 2.5
        pt.append(rng.uniform(lo, hi))
    return pt


def is_zero(e: ScalarExpr, chart: Chart | None = None, *, samples: int = ZERO_SAMPLES,
            tol: float = ZERO_TOL, seed: int = DEFAULT_SEED,
            profiles: Profiles | None = None) -> ZeroTest:
    """Symbolic-first zero test with a seeded sampling fallback."""
    if not e.terms:
        return ZeroTest(ZeroStatus.SYMBOLIC_ZERO)
    rng = random.Random(seed)
    dim = max(e.max_index() + 1, chart.dim if chart is not None else 0)
    prof = profiles if profiles is not None else _RandomProfiles(random.Random(seed + 1))
    done = attempts = 0
    while done < samples:
        attempts += 1
        if attempts > 20 * samples:
            raise DomainPole("could not find pole-free sample points")
        pt = sample_point(rng, dim, chart)
        try:
            val = evaluate(e, pt, prof)
        except DomainPole:
            continue
        if not abs(val) <= tol:
            return ZeroTest(ZeroStatus.NONZERO, tuple(pt), val)
        done += 1
    return ZeroTest(ZeroStatus.PROBABLY_ZERO)


# --------------------------------------------------------------------------
# text form

def _arg_text(b: Base, names) -> str:
    if b.index < 0:
        return "norm(" + ",".join(names(j) for j in b.group) + ")"
    return names(b.index) + ("^2" if b.squared else "")


def _atom_text(b: Base, e: int, names=None) -> str:
    names = names or (lambda j: f"x{j}")
    if b.tag == COORD:
        s = names(b.index)
    elif b.tag == NORM:
        s = _arg_text(b, names)
    elif b.tag == SIN:
        s = f"sin({_arg_text(b, names)})"
    elif b.tag == COS:
        s = f"cos({_arg_text(b, names)})"
    else:
        s = f"F[{b.name};{b.order}]({_arg_text(b, names)})"
    return s if e == 1 else f"{s}^{e}"


def to_text(e: ScalarExpr, names: Sequence[str] | None = None) -> str:
    """Deterministic serialization; see the grammar in the README."""
    if not e.terms:
        return "0"
    nm = (lambda j: names[j]) if names is not None else None
    parts = []
    for k, v in e.terms:
        parts.append("*".join([str(v)] + [_atom_text(b, ex, nm) for b, ex in k]))
    return " + ".join(parts)


_ARG = r"(?:x(\d+)(\^2)?|norm\(([\dx,]+)\))"
_ATOM_RE = re.compile(
    r"^(?:(?P<coord>x(?P<ci>\d+))"
    r"|(?P<trig>sin|cos)\(" + _ARG + r"\)"
    r"|F\[(?P<fname>[A-Za-z_][A-Za-z0-9_]*);(?P<ford>\d+)\]\(" + _ARG + r"\)"
    r"|norm\((?P<ngroup>[\dx,]+)\))"
    r"(?:\^(?P<exp>-?\d+))?$")


def _group(text: str) -> tuple[int, ...]:
    return tuple(int(t.strip()[1:]) for t in text.split(","))


def _parse_atom(tok: str) -> Atom:
    m = _ATOM_RE.match(tok)
    if not m:
        raise ValueError(f"cannot parse atom {tok!r}")
    exp = int(m.group("exp")) if m.group("exp") else 1
    if m.group("coord"):
        return coord(int(m.group("ci")), exp)
    if m.group("ngroup"):
        return norm(_group(m.group("ngroup")), exp)
    g = m.groups()
    if m.group("trig"):
        i, sq, grp = g[3], g[4], g[5]
        if grp:
            raise ValueError("trigonometric functions of norms are not atoms")
        maker = sin if m.group("trig") == "sin" else cos
        return maker(int(i), bool(sq), exp)
    i, sq, grp = g[8], g[9], g[10]
    arg = _group(grp) if grp else int(i)
    return fn(m.group("fname"), arg, bool(sq), int(m.group("ford")), exp)


def parse(text: str) -> ScalarExpr:
    """Inverse of :func:`to_text` (index-named coordinates only)."""
    text = text.strip()
    if text == "0":
        return ScalarExpr()
    raw = []
    for term in text.split(" + "):
        toks = term.split("*")
        raw.append((Fraction(toks[0]), [_parse_atom(t) for t in toks[1:]]))
    return canonicalize(raw)
