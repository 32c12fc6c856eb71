"""Hypothesis strategies and numeric oracles shared by the test modules."""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from lutzforms.chart import ANGLE, LINEAR, RADIAL, Chart
from lutzforms.forms import DiagonalMetric, DifferentialForm, VectorField, perm_sign
from lutzforms.scalar import ScalarExpr, canonicalize, coord, cos, evaluate, fn, sin

# x0 linear, x1 radial, x2 the angle paired with x1, x3 linear
CHART = Chart.of([("x0", LINEAR), ("x1", RADIAL), ("x2", ANGLE), ("x3", LINEAR)])
DIM = CHART.dim
METRIC = DiagonalMetric.cylindrical(CHART)


def profile_h(u, order, point):
    """Concrete stand-in for the opaque profile ``h``: ``exp(u/2)``."""
    return 0.5 ** order * math.exp(0.5 * u)


PROFILES = {"h": profile_h}

coefs = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def atoms(draw):
    i = draw(st.integers(0, DIM - 1))
    angle = CHART.kind(i).tag == "angle"
    kind = draw(st.sampled_from(["coord", "sin", "cos", "fn"]))
    sq = False if angle else draw(st.booleans())
    e = draw(st.integers(1, 2))
    if kind == "coord":
        return coord(i, e)
    if kind == "sin":
        return sin(i, sq, e)
    if kind == "cos":
        return cos(i, sq, e)
    return fn("h", i, sq, draw(st.integers(0, 1)), 1)


@st.composite
def scalars(draw, max_terms: int = 2, max_atoms: int = 2):
    raw = []
    for _ in range(draw(st.integers(1, max_terms))):
        raw.append((draw(coefs), draw(st.lists(atoms(), max_size=max_atoms))))
    return canonicalize(raw, CHART)


@st.composite
def forms(draw, degree: int | None = None, max_components: int = 2):
    p = draw(st.integers(0, 2)) if degree is None else degree
    out = DifferentialForm.zero(CHART, p)
    keys = list(itertools.combinations(range(DIM), p))
    for key in draw(st.lists(st.sampled_from(keys), min_size=1, max_size=max_components, unique=True)):
        out = out + DifferentialForm(CHART, p, {key: draw(scalars())})
    return out


@st.composite
def fields(draw):
    comps = {}
    for i in draw(st.lists(st.integers(0, DIM - 1), min_size=1, max_size=2, unique=True)):
        comps[i] = draw(scalars(max_terms=1))
    return VectorField(CHART, comps)


# ---------------------------------------------------------------------------
# numeric oracles

def sample_points(seed: int, count: int = 32) -> list[list[float]]:
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pts.append([rng.uniform(-1.2, 1.2), rng.uniform(0.3, 1.5), rng.uniform(0.0, 2 * math.pi),
                    rng.uniform(-1.2, 1.2)])
    return pts


def form_tensor(a: DifferentialForm, x, vectors) -> float:
    """``a(v_1, ..., v_p)`` at ``x`` via determinants of the selected rows."""
    V = np.array(vectors, dtype=float).reshape(len(vectors), DIM)
    total = 0.0
    for I, f in a.components.items():
        c = evaluate(f, x, PROFILES)
        if not I:
            total += c
            continue
        total += c * float(np.linalg.det(V[:, list(I)]))
    return total


def wedge_oracle(a: DifferentialForm, b: DifferentialForm, x, vectors) -> float:
    p, q = a.degree, b.degree
    total = 0.0
    for perm in itertools.permutations(range(p + q)):
        s = perm_sign(list(perm))
        total += s * form_tensor(a, x, [vectors[k] for k in perm[:p]]) * \
            form_tensor(b, x, [vectors[k] for k in perm[p:]])
    return total / (math.factorial(p) * math.factorial(q))


def fd_partial(f: ScalarExpr, x, i: int, h: float = 1e-5) -> float:
    xp, xm = list(x), list(x)
    xp[i] += h
    xm[i] -= h
    return (evaluate(f, xp, PROFILES) - evaluate(f, xm, PROFILES)) / (2 * h)


def fd_exterior(a: DifferentialForm, x, J: tuple[int, ...]) -> float:
    """``(d a)_J = sum_k (-1)^k d_{j_k} a_{J without j_k}`` by central differences."""
    total = 0.0
    for k, j in enumerate(J):
        rest = J[:k] + J[k + 1:]
        f = a.components.get(rest)
        if f is not None:
            total += (-1) ** k * fd_partial(f, x, j)
    return total


def top_oracle(a, G) -> float:
    """Coordinate coefficient of ``a ^ G^n`` from a covector and an antisymmetric matrix.

    ``sum_s sign(s) a_s0 prod_i (1/2) G_{s(2i-1) s(2i)}``.
    """
    a = np.asarray(a, dtype=float)
    total = 0.0
    for perm in itertools.permutations(range(a.size)):
        term = a[perm[0]]
        for i in range(1, a.size, 2):
            term *= 0.5 * G[perm[i], perm[i + 1]]
        total += perm_sign(list(perm)) * term
    return total


def fd_curl(alpha, x, h: float = 1e-5) -> np.ndarray:
    """``F[j, k] = d_j a_k - d_k a_j`` for a 1-form given as a numpy closure."""
    x = np.asarray(x, dtype=float)
    J = np.empty((x.size, x.size))
    for j in range(x.size):
        e = np.zeros(x.size)
        e[j] = h
        J[j] = (np.asarray(alpha(x + e)) - np.asarray(alpha(x - e))) / (2 * h)
    return J - J.T


def contact_top_fd(alpha, x, h: float = 1e-5) -> float:
    """Coordinate coefficient of ``a ^ (da)^n`` with ``da`` by central differences."""
    return top_oracle(alpha(np.asarray(x, dtype=float)), fd_curl(alpha, x, h))


def close(a: float, b: float, rel: float, abs_: float) -> bool:
    return abs(a - b) <= abs_ + rel * max(abs(a), abs(b))


__all__ = ["CHART", "DIM", "METRIC", "PROFILES", "atoms", "scalars", "forms", "fields",
           "sample_points", "form_tensor", "wedge_oracle", "fd_partial", "fd_exterior", "close",
           "contact_top_fd",
           "top_oracle", "fd_curl", "Fraction"]
