"""Exterior-calculus identities on random instances, with numeric oracles."""
import itertools
import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lutzforms.forms import (DifferentialForm, ext_d, hodge_star, interior, lie_derivative,
                             wedge)
from lutzforms.scalar import ScalarExpr, differentiate, evaluate

from strategies import (CHART, DIM, METRIC, PROFILES, close, fd_exterior, fields, form_tensor,
                        forms, sample_points, wedge_oracle)

INSTANCES = 500
POINTS = 32
FD_REL, FD_ABS = 1e-5, 1e-6       # central differences, h = 1e-5
ALG_REL, ALG_ABS = 1e-9, 1e-10    # determinant / permutation-sum oracles

PROPS = settings(max_examples=INSTANCES, deadline=None, derandomize=True,
                 suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])


def _vectors(rng, k):
    return [[rng.uniform(-1, 1) for _ in range(DIM)] for _ in range(k)]


def lie_oracle(X, a):
    """Coordinate formula ``X^k d_k a_I + sum_m a_{I[m->k]} d_{i_m} X^k``."""
    out = {}
    for I in itertools.combinations(range(DIM), a.degree):
        acc = ScalarExpr()
        f = a.components.get(I)
        for k, xk in X.components.items():
            if f is not None:
                acc = acc + xk * differentiate(f, k)
            for m, im in enumerate(I):
                J = I[:m] + (k,) + I[m + 1:]
                if len(set(J)) < len(J):
                    continue
                acc = acc + a.coefficient(*J) * differentiate(xk, im)
        out[I] = acc
    return DifferentialForm(CHART, a.degree, out)


@pytest.mark.property
@PROPS
@given(forms(), st.integers(0, 2 ** 31))
def test_d_squared_is_zero(a, seed):
    assert ext_d(ext_d(a)).is_zero()
    da = ext_d(a)
    for x in sample_points(seed, POINTS):
        for J in itertools.combinations(range(DIM), a.degree + 1):
            sym = evaluate(da.components.get(J, ScalarExpr()), x, PROFILES)
            assert close(sym, fd_exterior(a, x, J), FD_REL, FD_ABS), (J, x)


@pytest.mark.property
@PROPS
@given(forms(), st.data(), st.integers(0, 2 ** 31))
def test_leibniz(a, data, seed):
    b = data.draw(forms(degree=data.draw(st.integers(0, min(2, DIM - 1 - a.degree)))))
    lhs = ext_d(wedge(a, b))
    rhs = wedge(ext_d(a), b) + wedge(a, ext_d(b)) * (-1) ** a.degree
    assert (lhs - rhs).is_zero()
    rng = random.Random(seed)
    for x in sample_points(seed, POINTS):
        vs = _vectors(rng, a.degree + b.degree)
        assert close(form_tensor(wedge(a, b), x, vs), wedge_oracle(a, b, x, vs), ALG_REL, ALG_ABS)


@pytest.mark.property
@PROPS
@given(forms(), forms(), st.integers(0, 2 ** 31))
def test_graded_commutativity(a, b, seed):
    p, q = a.degree, b.degree
    assert (wedge(a, b) - wedge(b, a) * (-1) ** (p * q)).is_zero()
    rng = random.Random(seed)
    for x in sample_points(seed, POINTS):
        vs = _vectors(rng, p + q)
        assert close(form_tensor(wedge(b, a), x, vs), wedge_oracle(b, a, x, vs), ALG_REL, ALG_ABS)


@pytest.mark.property
@PROPS
@given(fields(), forms(), st.integers(0, 2 ** 31))
def test_cartan_formula(X, a, seed):
    assert (lie_derivative(X, a) - lie_oracle(X, a)).is_zero()
    if a.degree == 0:
        return
    ia = interior(X, a)
    rng = random.Random(seed)
    for x in sample_points(seed, POINTS):
        vs = _vectors(rng, a.degree - 1)
        Xv = X.evaluate(x, PROFILES)
        assert close(form_tensor(ia, x, vs), form_tensor(a, x, [Xv] + vs), ALG_REL, ALG_ABS)


@pytest.mark.property
@PROPS
@given(forms(), st.integers(0, 2 ** 31))
def test_hodge_star_sign_law(a, seed):
    p = a.degree
    ss = hodge_star(hodge_star(a, METRIC), METRIC)
    assert (ss - a * (-1) ** (p * (DIM - p))).is_zero()
    # a ^ *a = |a|^2 vol, |a|^2 = sum a_I^2 prod g^ii, vol = sqrt(det g) dx
    top = wedge(a, hodge_star(a, METRIC)).components.get(tuple(range(DIM)), ScalarExpr())
    for x in sample_points(seed, POINTS):
        g = [evaluate(e, x) for e in METRIC.entries]
        vol = 1.0
        for gi in g:
            vol *= gi ** 0.5
        norm2 = 0.0
        for I, f in a.components.items():
            w = evaluate(f, x, PROFILES) ** 2
            for i in I:
                w /= g[i]
            norm2 += w
        assert close(evaluate(top, x, PROFILES), norm2 * vol, ALG_REL, ALG_ABS)


def test_instance_count_is_pinned():
    assert PROPS.max_examples == 500 and POINTS == 32
